#include "qcopt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "qcopt/binio.hpp"
#include "qcopt/errors.hpp"
#include "qcopt/grid_encoding.hpp"
#include "qcopt/optimizer.hpp"
#include "qcopt/qasm.hpp"
#include "qcopt/schedule.hpp"
#include "qcopt/unitary.hpp"

namespace qcopt {

namespace {

constexpr char kDatasetMagic[4] = {'Q', 'G', 'D', 'S'};
constexpr uint16_t kDatasetVersion = 1;
constexpr uint64_t kCircuitSalt = 0xC1;
constexpr uint64_t kProbeSalt = 0xB0;

// Separable Gaussian with kernel truncated at 3 sigma; border taps fall off
// the grid, so each output renormalizes by the in-bounds weight.
void blur_axis(std::vector<float>& v, int rows, int cols, double sigma, bool along_cols) {
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(radius + 1);
    for (int i = 0; i <= radius; ++i) k[i] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    std::vector<float> out(v.size(), 0.0f);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0, wsum = 0.0;
            for (int d = -radius; d <= radius; ++d) {
                int rr = r, cc = c;
                (along_cols ? cc : rr) += d;
                if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
                double wt = k[std::abs(d)];
                acc += wt * v[static_cast<size_t>(rr) * cols + cc];
                wsum += wt;
            }
            out[static_cast<size_t>(r) * cols + c] = static_cast<float>(acc / wsum);
        }
    }
    v = std::move(out);
}

void write_sample(ByteWriter& w, const LabeledSample& s) {
    w.str(emit_qasm(s.circuit));
    w.u64(s.seed);
    w.u32(s.probes);
    w.u32(static_cast<uint32_t>(s.qubits));
    w.u32(static_cast<uint32_t>(s.slots));
    for (float t : s.target) w.f32(t);
}

LabeledSample read_sample(ByteReader& r, size_t index) {
    size_t start = r.offset();
    LabeledSample s;
    s.circuit = parse_qasm(r.str());
    s.seed = r.u64();
    s.probes = r.u32();
    s.qubits = static_cast<int>(r.u32());
    s.slots = static_cast<int>(r.u32());
    if (s.qubits < 0 || s.slots < 0 || s.qubits > 4096 || s.slots > 1 << 20)
        throw IoError("sample " + std::to_string(index) + " has an implausible target shape");
    s.target.resize(static_cast<size_t>(s.qubits) * s.slots);
    for (float& t : s.target) t = r.f32();
    uint32_t want = crc32_of(r.view(start, r.offset() - start));
    if (r.u32() != want)
        throw IoError("checksum mismatch: sample " + std::to_string(index) + " is corrupted");
    SlotLayout layout = schedule(s.circuit);
    if (s.qubits != layout.width || s.slots != layout.depth)
        throw IoError("sample " + std::to_string(index) + " target shape does not match its circuit");
    return s;
}

}  // namespace

void LabelConfig::validate() const {
    limits.validate();
    if (blur_sigma < 0) throw ConfigError("blur sigma must be >= 0");
}

void GenerateConfig::validate() const {
    if (count < 0) throw ConfigError("sample count must be >= 0");
    if (width < 1) throw ConfigError("width must be >= 1");
    if (length < 0) throw ConfigError("length must be >= 0");
    if (chunk < 1) throw ConfigError("chunk size must be >= 1");
    label.validate();
}

LabeledSample label_circuit(const Circuit& c, const GateSet& gs, const RewriteDB* db,
                            const LabelConfig& cfg, Rng& rng) {
    cfg.validate();
    c.validate();
    if (c.width > kQubitCap)
        throw ConfigError("labeling needs width <= " + std::to_string(kQubitCap));

    SlotLayout layout = schedule(c);
    LabeledSample s;
    s.circuit = c;
    s.qubits = layout.width;
    s.slots = layout.depth;
    s.target.assign(static_cast<size_t>(s.qubits) * s.slots, 0.0f);
    if (layout.depth == 0) return s;

    const int probes =
        cfg.probes > 0 ? cfg.probes : 2 * layout.width * layout.depth;
    s.probes = static_cast<uint32_t>(probes);
    const SynthesisConfig* synth = cfg.use_synthesis ? &cfg.synth : nullptr;

    for (int p = 0; p < probes; ++p) {
        Window w = sample_2d_uniform(layout, cfg.limits, rng);
        auto seg = split(c, layout, w);
        if (!seg || seg->middle.empty()) continue;
        CompactedBlock block = compact(seg->middle);
        if (static_cast<int>(block.active.size()) > 3) continue;
        auto cand = shorten_block(block.sub, gs, db, synth, rng);
        if (!cand) continue;
        if (!equal_up_to_phase(circuit_unitary(block.sub), circuit_unitary(*cand)).equal)
            continue;

        // Gates inside the window, by original index (split guarantees none
        // straddle the boundary).
        std::set<int> mids;
        for (int q = w.q_lo; q <= w.q_hi; ++q)
            for (int t = w.t_lo; t <= w.t_hi; ++t)
                if (int gi = layout.at(q, t); gi >= 0) mids.insert(gi);

        // A replacement gate that survives verbatim is not an opportunity;
        // mark only the cells of gates the replacement removes.
        std::vector<int> order(mids.begin(), mids.end());
        std::vector<char> kept(order.size(), 0);
        for (const Gate& cg : cand->gates) {
            Gate mapped = cg;
            mapped.q0 = block.active[cg.q0];
            if (cg.q1 >= 0) mapped.q1 = block.active[cg.q1];
            for (size_t j = 0; j < order.size(); ++j) {
                const Gate& mg = c.gates[order[j]];
                if (!kept[j] && mg.kind == mapped.kind && mg.same_qubits(mapped) &&
                    mg.angle == mapped.angle) {
                    kept[j] = 1;
                    break;
                }
            }
        }
        for (size_t j = 0; j < order.size(); ++j) {
            if (kept[j]) continue;
            const Gate& mg = c.gates[order[j]];
            int slot = layout.slots[order[j]];
            s.target[static_cast<size_t>(mg.q0) * s.slots + slot] = 1.0f;
            if (mg.q1 >= 0) s.target[static_cast<size_t>(mg.q1) * s.slots + slot] = 1.0f;
        }
    }

    if (cfg.blur_sigma > 0) {
        blur_axis(s.target, s.qubits, s.slots, cfg.blur_sigma, true);
        blur_axis(s.target, s.qubits, s.slots, cfg.blur_sigma, false);
        for (int q = 0; q < s.qubits; ++q)
            for (int t = 0; t < s.slots; ++t)
                if (layout.at(q, t) < 0) s.target[static_cast<size_t>(q) * s.slots + t] = 0.0f;
    }
    return s;
}

std::string dataset_chunk_path(const std::filesystem::path& out_path, int k) {
    return out_path.string() + ".chunk-" + std::to_string(k);
}

Dataset generate_chunk(const GateSet& gs, const RewriteDB* db, const GenerateConfig& cfg,
                       int first, int last) {
    cfg.validate();
    Dataset ds;
    ds.gs = gs;
    for (int i = first; i < last; ++i) {
        uint64_t cseed = derive_seed(cfg.seed, static_cast<uint64_t>(i), kCircuitSalt);
        Circuit c = random_circuit(cfg.width, cfg.length, gs, cseed);
        Rng rng(derive_seed(cfg.seed, static_cast<uint64_t>(i), kProbeSalt));
        LabeledSample s = label_circuit(c, gs, db, cfg.label, rng);
        s.seed = cseed;
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

namespace {

// A stored slice is trusted only if its first sample regenerates bit-for-bit
// under the current config (seed, shape, probe, or blur drift all surface in
// sample 0).
bool slice_matches(const Dataset& got, const GateSet& gs, const RewriteDB* db,
                   const GenerateConfig& cfg, int first, int last) {
    if (got.gs.kinds != gs.kinds) return false;
    if (static_cast<int>(got.samples.size()) != last - first) return false;
    if (first == last) return true;
    Dataset probe = generate_chunk(gs, db, cfg, first, first + 1);
    return got.samples[0] == probe.samples[0];
}

std::optional<Dataset> try_load(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    try {
        return load_dataset(path);
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

Dataset generate_dataset(const GateSet& gs, const RewriteDB* db, const GenerateConfig& cfg,
                         const std::filesystem::path& out_path, std::ostream* progress) {
    cfg.validate();
    if (auto done = try_load(out_path)) {
        if (slice_matches(*done, gs, db, cfg, 0, cfg.count)) {
            if (progress) *progress << "dataset reused: " << out_path.string() << "\n";
            return *done;
        }
    }

    const int chunks = cfg.count == 0 ? 0 : (cfg.count + cfg.chunk - 1) / cfg.chunk;
    Dataset all;
    all.gs = gs;
    for (int k = 0; k < chunks; ++k) {
        int first = k * cfg.chunk;
        int last = std::min(cfg.count, first + cfg.chunk);
        std::filesystem::path path = dataset_chunk_path(out_path, k);
        std::optional<Dataset> part = try_load(path);
        if (part && slice_matches(*part, gs, db, cfg, first, last)) {
            if (progress) *progress << "chunk " << k << "/" << chunks << " reused\n";
        } else {
            part = generate_chunk(gs, db, cfg, first, last);
            save_dataset(*part, path);
            if (progress)
                *progress << "chunk " << k << "/" << chunks << " generated ("
                          << part->samples.size() << " samples)\n";
        }
        for (LabeledSample& s : part->samples) all.samples.push_back(std::move(s));
    }

    save_dataset(all, out_path);
    for (int k = 0; k < chunks; ++k) {
        std::error_code ec;
        std::filesystem::remove(dataset_chunk_path(out_path, k), ec);
    }
    if (progress)
        *progress << "dataset saved: " << out_path.string() << " (" << all.samples.size()
                  << " samples)\n";
    return all;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    ByteWriter w;
    write_gate_set(w, ds.gs);
    w.u32(static_cast<uint32_t>(ds.samples.size()));
    for (const LabeledSample& s : ds.samples) {
        ByteWriter sw;
        write_sample(sw, s);
        w.bytes(sw.data().data(), sw.size());
        w.u32(crc32_of(sw.data()));
    }
    write_file(path, frame_file(kDatasetMagic, kDatasetVersion, w.data()));
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::string file = read_file(path);
    ByteReader r(check_frame(kDatasetMagic, kDatasetVersion, file));
    Dataset ds;
    ds.gs = read_gate_set(r);
    uint32_t count = r.u32();
    ds.samples.reserve(count);
    for (uint32_t i = 0; i < count; ++i) ds.samples.push_back(read_sample(r, i));
    if (r.remaining() != 0) throw IoError("trailing bytes after the last sample");
    return ds;
}

TrainSample to_train_sample(const LabeledSample& s, const GateSet& gs) {
    TrainSample ts;
    ts.x = encode_grid(s.circuit, gs);
    GridChannels ch = grid_channel_layout(gs);
    size_t cells = static_cast<size_t>(ts.x.h) * ts.x.w;
    ts.target.assign(cells, 0.0f);
    ts.mask.assign(cells, 0);
    for (int y = 0; y < ts.x.h; ++y)
        for (int x = 0; x < ts.x.w; ++x)
            ts.mask[static_cast<size_t>(y) * ts.x.w + x] =
                ts.x.at(ch.occupancy, y, x) != 0.0 ? 1 : 0;
    for (int q = 0; q < s.qubits; ++q)
        for (int t = 0; t < s.slots; ++t)
            ts.target[static_cast<size_t>(q) * ts.x.w + t] = s.at(q, t);
    return ts;
}

}  // namespace qcopt
