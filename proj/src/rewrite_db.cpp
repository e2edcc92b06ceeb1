#include "qcopt/rewrite_db.hpp"

#include <algorithm>
#include <cmath>

#include "qcopt/binio.hpp"

namespace qcopt {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr char kMagic[4] = {'Q', 'R', 'D', 'B'};
constexpr uint16_t kVersion = 1;
}  // namespace

std::vector<double> make_angle_grid(int divisor) {
    if (divisor < 1) throw ConfigError("make_angle_grid: divisor must be >= 1");
    std::vector<double> grid;
    for (int k = -divisor + 1; k <= divisor; ++k)
        if (k != 0) grid.push_back(k * kPi / divisor);
    return grid;
}

std::vector<int32_t> canonical_quantized(const Unitary& U) {
    // Row-major scan for the largest magnitude. Magnitudes are compared at the
    // same 1e-6 quantization as the entries so that the frequent exact ties of
    // grid-angle unitaries (1/sqrt(2) everywhere, etc.) are not broken by
    // float noise; quantized ties go to the earliest index.
    Eigen::Index br = 0, bc = 0;
    int64_t best = -1;
    for (Eigen::Index r = 0; r < U.rows(); ++r)
        for (Eigen::Index c = 0; c < U.cols(); ++c) {
            int64_t m = std::llround(std::abs(U(r, c)) * 1e6);
            if (m > best) {
                best = m;
                br = r;
                bc = c;
            }
        }
    std::complex<double> rot = std::exp(std::complex<double>(0, -std::arg(U(br, bc))));
    std::vector<int32_t> out;
    out.reserve(static_cast<size_t>(U.size()) * 2);
    for (Eigen::Index r = 0; r < U.rows(); ++r)
        for (Eigen::Index c = 0; c < U.cols(); ++c) {
            std::complex<double> v = U(r, c) * rot;
            out.push_back(static_cast<int32_t>(std::llround(v.real() * 1e6)));
            out.push_back(static_cast<int32_t>(std::llround(v.imag() * 1e6)));
        }
    return out;
}

uint64_t fnv1a64(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

uint64_t canonical_key(const std::vector<int32_t>& quantized) {
    return fnv1a64(quantized.data(), quantized.size() * sizeof(int32_t));
}

size_t RewriteDB::size() const {
    size_t n = 0;
    for (const auto& [h, bucket] : buckets) n += bucket.size();
    return n;
}

std::optional<Circuit> RewriteDB::lookup(const Unitary& U) const {
    if (U.rows() != (Eigen::Index{1} << q))
        throw ConfigError("lookup: unitary dimension does not match db qubit count");
    std::vector<int32_t> qm = canonical_quantized(U);
    auto it = buckets.find(canonical_key(qm));
    if (it == buckets.end()) return std::nullopt;
    for (const DbEntry& e : it->second) {
        if (e.qmat != qm) continue;
        // Quantization resolves 1e-6 per component; verify at that scale.
        Unitary stored = circuit_unitary(e.circuit);
        if (equal_up_to_phase(stored, U, 1e-6 * static_cast<double>(U.rows())).equal)
            return e.circuit;
    }
    return std::nullopt;
}

std::vector<Gate> enumerate_placements(const GateSet& gs, int q) {
    std::vector<Gate> out;
    for (GateKind k : gs.kinds) {
        if (arity(k) == 1) {
            for (int w = 0; w < q; ++w) out.push_back({k, w, -1, 0.0});
        } else if (q >= 2) {
            for (int a = 0; a < q; ++a)
                for (int b = a + 1; b < q; ++b) out.push_back({k, a, b, 0.0});
        }
    }
    return out;
}

RewriteDB build_db(const GateSet& gs, int q, std::vector<double> grid, int depth, size_t cap) {
    if (q < 1 || q > 3) throw ConfigError("build_db: q must be 1, 2, or 3");
    if (depth < 0) throw ConfigError("build_db: negative depth");
    if (grid.empty()) throw ConfigError("build_db: empty angle grid");

    RewriteDB db;
    db.gs = gs;
    db.q = q;
    db.grid = std::move(grid);
    db.depth = depth;

    std::vector<Gate> moves;
    for (const Gate& placement : enumerate_placements(gs, q)) {
        if (parameterized(placement.kind)) {
            for (double a : db.grid) {
                Gate g = placement;
                g.angle = a;
                moves.push_back(g);
            }
        } else {
            moves.push_back(placement);
        }
    }

    const Eigen::Index dim = Eigen::Index{1} << q;
    struct Node {
        Circuit c;
        Unitary u;
    };

    auto insert_new = [&](const Circuit& c, const Unitary& u, uint64_t& hash_out) -> bool {
        std::vector<int32_t> qm = canonical_quantized(u);
        hash_out = canonical_key(qm);
        auto& bucket = db.buckets[hash_out];
        for (const DbEntry& e : bucket)
            if (e.qmat == qm) return false;  // seen at this or a shorter length
        bucket.push_back({std::move(qm), c});
        return true;
    };

    std::vector<Node> frontier;
    {
        Circuit empty{q, {}};
        Unitary ident = Unitary::Identity(dim, dim);
        uint64_t h;
        insert_new(empty, ident, h);
        frontier.push_back({std::move(empty), std::move(ident)});
    }

    size_t count = 1;
    for (int len = 1; len <= depth && !frontier.empty(); ++len) {
        std::vector<Node> next;
        std::vector<uint64_t> added;  // hashes inserted at this length, in order
        bool overflow = false;
        for (const Node& node : frontier) {
            for (const Gate& mv : moves) {
                Unitary u2 = node.u;
                apply_gate(u2, mv, q);
                Circuit c2 = node.c;
                c2.gates.push_back(mv);
                uint64_t h;
                if (!insert_new(c2, u2, h)) continue;
                added.push_back(h);
                ++count;
                if (count > cap) {
                    overflow = true;
                    break;
                }
                next.push_back({std::move(c2), std::move(u2)});
            }
            if (overflow) break;
        }
        if (overflow) {
            // Drop the partial length: entries were appended to their buckets,
            // so popping in reverse insertion order removes exactly them.
            for (auto it = added.rbegin(); it != added.rend(); ++it) {
                auto& bucket = db.buckets[*it];
                bucket.pop_back();
                if (bucket.empty()) db.buckets.erase(*it);
            }
            db.truncated = true;
            db.depth = len - 1;
            return db;
        }
        frontier = std::move(next);
    }
    return db;
}

namespace {

void sort_entries(std::vector<std::pair<uint64_t, const DbEntry*>>& flat) {
    std::sort(flat.begin(), flat.end(), [](const auto& a, const auto& b) {
        size_t la = a.second->circuit.gates.size(), lb = b.second->circuit.gates.size();
        if (la != lb) return la < lb;
        if (a.first != b.first) return a.first < b.first;
        return a.second->qmat < b.second->qmat;
    });
}

}  // namespace

void save_db(const RewriteDB& db, const std::filesystem::path& path) {
    ByteWriter w;
    write_gate_set(w, db.gs);
    w.u8(static_cast<uint8_t>(db.q));
    w.u32(static_cast<uint32_t>(db.grid.size()));
    for (double a : db.grid) w.f64(a);
    w.u32(static_cast<uint32_t>(db.depth));
    w.u8(db.truncated ? 1 : 0);

    std::vector<std::pair<uint64_t, const DbEntry*>> flat;
    for (const auto& [h, bucket] : db.buckets)
        for (const DbEntry& e : bucket) flat.emplace_back(h, &e);
    sort_entries(flat);

    w.u64(flat.size());
    for (const auto& [h, e] : flat) {
        w.u64(h);
        w.u32(static_cast<uint32_t>(e->qmat.size()));
        for (int32_t v : e->qmat) w.i32(v);
        write_circuit(w, e->circuit);
    }
    write_file(path, frame_file(kMagic, kVersion, w.data()));
}

RewriteDB load_db(const std::filesystem::path& path, bool verify_entries) {
    std::string file = read_file(path);
    std::string_view payload = check_frame(kMagic, kVersion, file);
    ByteReader r(payload);

    RewriteDB db;
    db.gs = read_gate_set(r);
    db.q = r.u8();
    if (db.q < 1 || db.q > 3) throw IoError("db file: bad qubit count");
    uint32_t gn = r.u32();
    for (uint32_t i = 0; i < gn; ++i) db.grid.push_back(r.f64());
    db.depth = static_cast<int>(r.u32());
    db.truncated = r.u8() != 0;

    const size_t expected_qmat = (size_t{1} << db.q) * (size_t{1} << db.q) * 2;
    uint64_t n = r.u64();
    for (uint64_t i = 0; i < n; ++i) {
        uint64_t h = r.u64();
        uint32_t qn = r.u32();
        if (qn != expected_qmat) throw IoError("db file: entry matrix size mismatch");
        DbEntry e;
        e.qmat.reserve(qn);
        for (uint32_t k = 0; k < qn; ++k) e.qmat.push_back(r.i32());
        e.circuit = read_circuit(r);
        if (e.circuit.width != db.q) throw IoError("db file: entry circuit width mismatch");
        if (h != canonical_key(e.qmat)) throw IoError("db file: entry hash mismatch");
        if (verify_entries &&
            canonical_quantized(circuit_unitary(e.circuit)) != e.qmat)
            throw IoError("db file: entry " + std::to_string(i) +
                          " does not reproduce its stored matrix");
        db.buckets[h].push_back(std::move(e));
    }
    if (r.remaining() != 0) throw IoError("db file: trailing bytes");
    return db;
}

Circuit fuse_local(const Circuit& c) {
    std::vector<Gate> g = c.gates;
    std::vector<char> alive(g.size(), 1);
    auto is_zero_angle = [](double a) { return std::abs(std::remainder(a, 2 * kPi)) <= 1e-12; };

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < g.size(); ++i) {
            if (!alive[i]) continue;
            if (parameterized(g[i].kind) && is_zero_angle(g[i].angle)) {
                alive[i] = 0;
                changed = true;
                continue;
            }
            // The first later gate on any shared wire either merges or blocks.
            for (size_t j = i + 1; j < g.size(); ++j) {
                if (!alive[j] || !g[j].shares_qubit(g[i])) continue;
                if (g[j].kind == g[i].kind && g[j].same_qubits(g[i])) {
                    if (g[i].kind == GateKind::CZ) {
                        alive[i] = alive[j] = 0;
                    } else {
                        g[i].angle += g[j].angle;
                        alive[j] = 0;
                    }
                    changed = true;
                }
                break;
            }
        }
    }

    Circuit out;
    out.width = c.width;
    for (size_t i = 0; i < g.size(); ++i)
        if (alive[i]) out.gates.push_back(g[i]);
    return out;
}

}  // namespace qcopt
