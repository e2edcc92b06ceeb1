#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcopt/gate.hpp"
#include "qcopt/rewrite_db.hpp"
#include "qcopt/rng.hpp"
#include "qcopt/sampler.hpp"
#include "qcopt/schedule.hpp"
#include "qcopt/synthesis.hpp"
#include "qcopt/unet.hpp"

namespace qcopt {

enum class VerifyMode { EVERY_STEP = 0, FINAL = 1, OFF = 2 };
enum class VerifyStatus { PASSED = 0, FAILED = 1, SKIPPED = 2, NOT_CHECKED = 3 };

const char* verify_mode_name(VerifyMode m);
VerifyMode verify_mode_from_name(std::string_view name);  // "every", "final", "off"
const char* verify_status_name(VerifyStatus s);

struct OptimizeConfig {
    Strategy strategy = Strategy::UNIFORM_2D;
    int max_iterations = -1;  // < 0: unset
    double budget_s = -1.0;   // < 0: unset
    int target_gates = -1;    // < 0: unset
    SamplerLimits limits;
    SynthesisConfig synth;
    bool use_synthesis = false;  // continuous-angle fallback, off by default
    VerifyMode verify = VerifyMode::EVERY_STEP;
    uint64_t seed = 0;
    // Guided only. 0: refresh the attention map after every accepted
    // replacement (default). R > 0: every R iterations, plus whenever the
    // grid shape changed.
    int attention_refresh = 0;
    // Record wall time in trace rows. Off keeps byte-identical CSVs per seed.
    bool timing = false;

    /// At least one stopping criterion; guided iff a model is supplied.
    void validate(bool has_model) const;
};

/// One row per iteration. For the 1d strategy the slot columns carry the
/// token run [m, m+n) and the qubit columns are -1.
struct TraceRow {
    int iter = 0;
    int gates = 0;           // after this iteration
    double elapsed_ms = 0.0; // 0 unless timing is enabled
    bool accepted = false;
    Window window{-1, -1, -1, -1};
    int reduced_by = 0;
};

struct ConvergenceTrace {
    std::vector<TraceRow> rows;
};

inline constexpr const char* kTraceHeader = "iter,gates,elapsed_ms,accepted,q_lo,q_hi,t_lo,t_hi,reduced_by";
std::string trace_to_csv(const ConvergenceTrace& trace);

struct OptimizeResult {
    Circuit circuit;
    ConvergenceTrace trace;
    VerifyStatus verdict = VerifyStatus::NOT_CHECKED;
    int iterations = 0;
    int accepted = 0;
    std::string stop_reason;  // "iterations" | "budget" | "target" | "verify-failed"
};

/// Searches for a strictly shorter equivalent of a compacted sub-circuit
/// (width = its wire count k): local fusion first, then database lookup
/// (widened to the database's wire count when k is smaller; replacements
/// touching the widening wires are rejected), then continuous synthesis when
/// a config is given. Returns a circuit at width k with fewer gates, or
/// nullopt.
std::optional<Circuit> shorten_block(const Circuit& sub, const GateSet& gs, const RewriteDB* db,
                                     const SynthesisConfig* synth, Rng& rng);

/// Full-circuit phase-equivalence at tol 1e-8 * dim. SKIPPED above the
/// unitary cap, never a silent pass.
VerifyStatus verify_equivalence(const Circuit& original, const Circuit& optimized);

/// The sample -> split -> compact -> shorten -> splice loop. Every iteration
/// appends one trace row; gate count never increases; every accepted
/// replacement is re-checked phase-equivalent on the compacted block at
/// 1e-8 * 2^k before splicing, regardless of the verification mode.
OptimizeResult optimize(const Circuit& c, const GateSet& gs, const RewriteDB* db,
                        const UNetModel* model, const OptimizeConfig& cfg);

}  // namespace qcopt
