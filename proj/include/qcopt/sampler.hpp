#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "qcopt/gate.hpp"
#include "qcopt/rng.hpp"
#include "qcopt/schedule.hpp"

namespace qcopt {

/// Per-cell reducibility score in [0,1] over a qubits x slots grid; the
/// guided sampler's prior. Row-major, values[q * slots + t].
struct AttentionMap {
    int qubits = 0;
    int slots = 0;
    std::vector<double> values;

    AttentionMap() = default;
    AttentionMap(int q, int s, double fill = 0.0)
        : qubits(q), slots(s), values(static_cast<size_t>(q) * s, fill) {}

    double at(int q, int t) const { return values[static_cast<size_t>(q) * slots + t]; }
    double& at(int q, int t) { return values[static_cast<size_t>(q) * slots + t]; }

    bool shape_matches(const SlotLayout& layout) const {
        return qubits == layout.width && slots == layout.depth;
    }

    /// Checks shape consistency and that every entry is finite in [0,1].
    void validate() const;
};

enum class Strategy { UNIFORM_1D = 0, UNIFORM_2D = 1, GUIDED = 2 };

const char* strategy_name(Strategy s);
/// Accepts "1d", "2d", "guided". Throws ConfigError otherwise.
Strategy strategy_from_name(std::string_view name);

struct SamplerLimits {
    int max_qubit_span = 3;  // db/synthesis width cap
    int max_slot_span = 8;
    int max_run = 8;           // 1d arm: max token-run length
    int shuffle_moves = 3;     // 1d arm: swap attempts before each draw
    double attention_floor = 0.02;  // eta: uniform admixture for guided anchors

    void validate() const;
};

/// Result of one 1d draw: the chain after the shuffle step plus the selected
/// run [m, m+n). The shuffle only exchanges adjacent qubit-disjoint gates, so
/// shuffled always has the same unitary as the input.
struct Run1D {
    Circuit shuffled;
    int m = 0;
    int n = 0;
};

/// Token-chain baseline. Attempts limits.shuffle_moves random adjacent swaps
/// (each kept only when the pair shares no qubit), then draws m uniform over
/// starts that leave room for a run of 2, and n uniform in
/// [2, min(max_run, L - m)]. A single-gate circuit degenerates to m=0, n=1.
Run1D sample_1d(const Circuit& c, const SamplerLimits& limits, Rng& rng);

/// Uniform window law: q_lo and t_lo uniform over cells, spans uniform in
/// [1, max span], high edges clipped to the grid.
Window sample_2d_uniform(const SlotLayout& layout, const SamplerLimits& limits, Rng& rng);

/// Draws a cell with probability proportional to attn + floor_eta. Falls back
/// to a uniform cell when the total mass is zero. Returns (qubit, slot).
std::pair<int, int> draw_anchor(const AttentionMap& attn, double floor_eta, Rng& rng);

/// Guided window law: anchor via draw_anchor, spans as in the uniform law,
/// window offset uniform among positions that keep the anchor inside, then
/// clipped to the grid (the anchor stays inside after clipping).
Window sample_2d_guided(const SlotLayout& layout, const AttentionMap& attn,
                        const SamplerLimits& limits, Rng& rng);

}  // namespace qcopt
