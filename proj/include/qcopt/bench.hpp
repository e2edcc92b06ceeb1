#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcopt/optimizer.hpp"

namespace qcopt {

struct BenchConfig {
    int circuits = 100;
    int width = 8;
    int length = 100;
    std::vector<Strategy> strategies;
    int iters = 2000;
    uint64_t seed = 0;
    SamplerLimits limits;
    bool use_synthesis = false;
    SynthesisConfig synth;
    VerifyMode verify = VerifyMode::FINAL;
    bool timing = false;  // off keeps every output byte-reproducible per seed
    int threads = 0;      // 0: one per hardware thread, capped by the run count

    void validate(bool has_model) const;
};

/// One circuit x strategy run. kind_counts follows the gate set's kind order
/// and describes the final circuit.
struct RunSummary {
    uint64_t seed = 0;  // circuit seed
    Strategy strategy = Strategy::UNIFORM_2D;
    int init_gates = 0;
    int final_gates = 0;
    std::vector<int> kind_counts;
    int iters = 0;
    double ms = 0.0;
    bool verified = false;  // verdict == PASSED
};

struct ConvergencePoint {
    Strategy strategy = Strategy::UNIFORM_2D;
    int iter = 0;
    double median = 0.0, q1 = 0.0, q3 = 0.0;
};

struct BenchResult {
    std::vector<RunSummary> runs;  // grouped by strategy, circuits in order
    std::vector<ConvergencePoint> convergence;
    bool any_verify_failed = false;
};

/// "a,b,c" over the strategy names; throws ConfigError on unknown names,
/// duplicates, or an empty list.
std::vector<Strategy> parse_strategies(std::string_view csv);

/// Linear-interpolation quantile of an unsorted copy (the convention most
/// stats packages default to). p in [0, 1].
double quantile(std::vector<double> v, double p);

std::string trace_file_name(Strategy s, int circuit_index);

/// Per-run rows grouped by strategy, each block followed by its mean / std /
/// median / q1 / q3 rows (std is the population form). The seed column names
/// the aggregate rows.
std::string summary_csv(const BenchResult& r, const GateSet& gs);

/// strategy,iter,median,q1,q3 rows for every iteration index.
std::string convergence_csv(const BenchResult& r);

/// Splits header + rows on commas (the emitted CSVs never quote).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// 0 normally, 3 if any run failed verification.
int bench_exit_code(const BenchResult& r);

/// Optimizes `circuits` random circuits under every strategy (paired seeds:
/// each strategy sees the same circuits), fanned out over a worker pool, then
/// writes summary.csv, convergence.csv, and one trace CSV per run to out_dir.
BenchResult bench_run(const GateSet& gs, const RewriteDB* db, const UNetModel* model,
                      const BenchConfig& cfg, const std::filesystem::path& out_dir,
                      std::ostream* progress = nullptr);

}  // namespace qcopt
