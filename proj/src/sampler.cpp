#include "qcopt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcopt/errors.hpp"

namespace qcopt {

void AttentionMap::validate() const {
    if (qubits < 1 || slots < 1)
        throw ConfigError("attention map must be at least 1x1");
    if (values.size() != static_cast<size_t>(qubits) * slots)
        throw ConfigError("attention map value count does not match its shape");
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw ConfigError("attention map entries must be finite in [0,1]");
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::UNIFORM_1D: return "1d";
        case Strategy::UNIFORM_2D: return "2d";
        case Strategy::GUIDED: return "guided";
    }
    throw ConfigError("unknown strategy");
}

Strategy strategy_from_name(std::string_view name) {
    if (name == "1d") return Strategy::UNIFORM_1D;
    if (name == "2d") return Strategy::UNIFORM_2D;
    if (name == "guided") return Strategy::GUIDED;
    throw ConfigError("unknown strategy '" + std::string(name) + "' (expected 1d, 2d, or guided)");
}

void SamplerLimits::validate() const {
    if (max_qubit_span < 1 || max_slot_span < 1)
        throw ConfigError("window span limits must be >= 1");
    if (max_run < 2)
        throw ConfigError("max 1d run length must be >= 2");
    if (shuffle_moves < 0)
        throw ConfigError("shuffle move count must be >= 0");
    if (!(attention_floor >= 0.0))
        throw ConfigError("attention floor must be >= 0");
}

Run1D sample_1d(const Circuit& c, const SamplerLimits& limits, Rng& rng) {
    if (c.empty())
        throw ConfigError("cannot sample a run from an empty circuit");
    limits.validate();

    Run1D out;
    out.shuffled = c;
    auto& g = out.shuffled.gates;
    const int L = static_cast<int>(g.size());

    if (L >= 2) {
        for (int s = 0; s < limits.shuffle_moves; ++s) {
            int i = rng.uniform_int(0, L - 2);
            if (!g[i].shares_qubit(g[i + 1])) std::swap(g[i], g[i + 1]);
        }
    }

    if (L < 2) {
        out.m = 0;
        out.n = 1;
        return out;
    }
    out.m = rng.uniform_int(0, L - 2);
    out.n = rng.uniform_int(2, std::min(limits.max_run, L - out.m));
    return out;
}

namespace {

// Span first, then an anchor-relative offset so the window keeps `anchor`
// inside; high edge clipped to the grid.
void place_axis(int extent, int max_span, int anchor, Rng& rng, int& lo, int& hi) {
    int span = rng.uniform_int(1, max_span);
    int lo_min = std::max(0, anchor - span + 1);
    lo = rng.uniform_int(lo_min, anchor);
    hi = std::min(lo + span - 1, extent - 1);
}

}  // namespace

Window sample_2d_uniform(const SlotLayout& layout, const SamplerLimits& limits, Rng& rng) {
    limits.validate();
    if (layout.width < 1 || layout.depth < 1)
        throw ConfigError("cannot sample a window from an empty layout");

    Window w;
    w.q_lo = rng.uniform_int(0, layout.width - 1);
    w.q_hi = std::min(w.q_lo + rng.uniform_int(1, limits.max_qubit_span) - 1, layout.width - 1);
    w.t_lo = rng.uniform_int(0, layout.depth - 1);
    w.t_hi = std::min(w.t_lo + rng.uniform_int(1, limits.max_slot_span) - 1, layout.depth - 1);
    return w;
}

std::pair<int, int> draw_anchor(const AttentionMap& attn, double floor_eta, Rng& rng) {
    attn.validate();
    const size_t n = attn.values.size();
    std::vector<double> cdf(n);
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        acc += attn.values[i] + floor_eta;
        cdf[i] = acc;
    }
    size_t idx;
    if (acc <= 0.0) {
        idx = static_cast<size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
    } else {
        double r = rng.uniform_double() * acc;
        idx = std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin();
        if (idx >= n) idx = n - 1;  // guards r landing on the total by rounding
    }
    return {static_cast<int>(idx) / attn.slots, static_cast<int>(idx) % attn.slots};
}

Window sample_2d_guided(const SlotLayout& layout, const AttentionMap& attn,
                        const SamplerLimits& limits, Rng& rng) {
    limits.validate();
    if (!attn.shape_matches(layout))
        throw ConfigError("attention map shape does not match the layout");

    auto [qa, ta] = draw_anchor(attn, limits.attention_floor, rng);
    Window w;
    place_axis(layout.width, limits.max_qubit_span, qa, rng, w.q_lo, w.q_hi);
    place_axis(layout.depth, limits.max_slot_span, ta, rng, w.t_lo, w.t_hi);
    return w;
}

}  // namespace qcopt
