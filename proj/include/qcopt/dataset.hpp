#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcopt/gate.hpp"
#include "qcopt/rewrite_db.hpp"
#include "qcopt/rng.hpp"
#include "qcopt/sampler.hpp"
#include "qcopt/synthesis.hpp"
#include "qcopt/unet.hpp"

namespace qcopt {

/// Label-probe settings. Probing draws uniform windows on the fixed circuit
/// and records which gates a successful replacement removes.
struct LabelConfig {
    int probes = 0;  // <= 0: twice the slot-grid cell count
    SamplerLimits limits;
    bool use_synthesis = false;
    SynthesisConfig synth;
    double blur_sigma = 0.0;  // 0 keeps the raw binary union

    void validate() const;
};

/// One heatmap training example. The target grid matches the circuit's slot
/// layout (no padding) and is nonzero only on occupied cells.
struct LabeledSample {
    Circuit circuit;
    int qubits = 0;
    int slots = 0;
    std::vector<float> target;  // row-major, qubits x slots
    uint64_t seed = 0;          // circuit seed recorded by the generator
    uint32_t probes = 0;        // windows actually drawn

    float at(int q, int t) const { return target[static_cast<size_t>(q) * slots + t]; }

    bool operator==(const LabeledSample& o) const {
        return circuit.width == o.circuit.width && circuit.gates == o.circuit.gates &&
               qubits == o.qubits && slots == o.slots && target == o.target && seed == o.seed &&
               probes == o.probes;
    }
};

struct Dataset {
    GateSet gs;
    std::vector<LabeledSample> samples;
};

/// Draws cfg.probes uniform windows; every window whose middle block admits a
/// strictly shorter phase-equivalent replacement marks the cells of the gates
/// that replacement removes. Targets are the union over probes, optionally
/// Gaussian-blurred (truncated at 3 sigma, renormalized at borders) and then
/// re-masked to occupied cells.
LabeledSample label_circuit(const Circuit& c, const GateSet& gs, const RewriteDB* db,
                            const LabelConfig& cfg, Rng& rng);

struct GenerateConfig {
    int count = 2000;
    int width = 8;
    int length = 100;
    uint64_t seed = 0;
    int chunk = 500;  // samples per resumable chunk file
    LabelConfig label;

    void validate() const;
};

/// Path of the k-th standalone chunk file backing a resumable generation run.
std::string dataset_chunk_path(const std::filesystem::path& out_path, int k);

/// Samples [first, last) of the run described by cfg. Each sample's circuit
/// and probe stream are derived from (cfg.seed, index), so any slice can be
/// produced independently and in parallel.
Dataset generate_chunk(const GateSet& gs, const RewriteDB* db, const GenerateConfig& cfg,
                       int first, int last);

/// Full run with resume: existing chunk files are reused when their first
/// sample regenerates identically (catches seed or config drift), missing or
/// stale ones are rebuilt, and the assembled dataset is written to out_path
/// before the chunks are removed. A valid out_path short-circuits the run.
/// Progress lines go to *progress when given.
Dataset generate_dataset(const GateSet& gs, const RewriteDB* db, const GenerateConfig& cfg,
                         const std::filesystem::path& out_path, std::ostream* progress = nullptr);

/// Container: magic "QGDS", version, gate set, sample count, then per sample
/// the circuit as length-prefixed QASM, generator metadata, the target grid
/// as 32-bit floats, and a CRC32 over that sample's bytes.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

/// Network view of a sample: encoded input, target padded to the input's
/// spatial shape, mask = the occupancy channel.
TrainSample to_train_sample(const LabeledSample& s, const GateSet& gs);

}  // namespace qcopt
