#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qcopt/rewrite_db.hpp"
#include "qcopt/rng.hpp"
#include "qcopt/unitary.hpp"

namespace qcopt {

/// Continuous-angle fallback search. Off by default in the optimizer loop;
/// enabled per run (CLI --synth).
struct SynthesisConfig {
    int max_length = 3;
    int restarts = 4;
    double eps = 1e-6;      // accepted hilbert_schmidt_distance
    int eval_budget = 2000; // objective evaluations per skeleton, shared by restarts
};

/// Derivative-free simplex minimizer for the angle vectors (standard
/// reflect/expand/contract/shrink). Exposed for tests.
struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evals = 0;
};
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double step, int max_evals);

/// Searches for a strictly shorter realization of U over the gate set:
/// db lookup first (when the dimensions match), then skeleton enumeration in
/// increasing length with simplex descent over the angles, cfg.restarts random
/// starts per skeleton. Deterministic given the rng state. Returns the first
/// circuit with distance <= cfg.eps, or nullopt.
std::optional<Circuit> synthesize_shorter(const Unitary& U, const GateSet& gs, int current_len,
                                          const SynthesisConfig& cfg, const RewriteDB* db,
                                          Rng& rng);

}  // namespace qcopt
