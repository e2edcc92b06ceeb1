#include "qcopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "qcopt/binio.hpp"
#include "qcopt/errors.hpp"

namespace qcopt {

void BenchConfig::validate(bool has_model) const {
    if (circuits < 1) throw ConfigError("need at least one circuit");
    if (width < 1) throw ConfigError("width must be >= 1");
    if (length < 0) throw ConfigError("length must be >= 0");
    if (iters < 0) throw ConfigError("iterations must be >= 0");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (strategies.empty()) throw ConfigError("no strategies selected");
    limits.validate();
    bool guided = std::find(strategies.begin(), strategies.end(), Strategy::GUIDED) !=
                  strategies.end();
    if (guided && !has_model) throw ConfigError("the guided strategy needs an attention model");
}

std::vector<Strategy> parse_strategies(std::string_view csv) {
    std::vector<Strategy> out;
    size_t pos = 0;
    while (pos <= csv.size()) {
        size_t comma = csv.find(',', pos);
        if (comma == std::string_view::npos) comma = csv.size();
        std::string_view name = csv.substr(pos, comma - pos);
        Strategy s = strategy_from_name(name);
        if (std::find(out.begin(), out.end(), s) != out.end())
            throw ConfigError("duplicate strategy '" + std::string(name) + "'");
        out.push_back(s);
        pos = comma + 1;
    }
    return out;
}

double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw ConfigError("quantile of an empty sample");
    std::sort(v.begin(), v.end());
    double h = (static_cast<double>(v.size()) - 1.0) * p;
    size_t lo = static_cast<size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

std::string trace_file_name(Strategy s, int circuit_index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "-%03d.csv", circuit_index);
    return std::string("trace-") + strategy_name(s) + buf;
}

namespace {

std::string format_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void append_aggregate(std::string& out, const char* label, Strategy s,
                      const std::vector<std::vector<double>>& cols) {
    out += label;
    out += ',';
    out += strategy_name(s);
    for (const auto& col : cols) {
        out += ',';
        double v = 0;
        if (std::string_view(label) == "mean") {
            for (double x : col) v += x;
            v /= static_cast<double>(col.size());
        } else if (std::string_view(label) == "std") {
            double m = 0;
            for (double x : col) m += x;
            m /= static_cast<double>(col.size());
            for (double x : col) v += (x - m) * (x - m);
            v = std::sqrt(v / static_cast<double>(col.size()));
        } else if (std::string_view(label) == "median") {
            v = quantile(col, 0.5);
        } else if (std::string_view(label) == "q1") {
            v = quantile(col, 0.25);
        } else {
            v = quantile(col, 0.75);
        }
        out += format_num(v);
    }
    out += '\n';
}

}  // namespace

std::string summary_csv(const BenchResult& r, const GateSet& gs) {
    std::string out = "seed,strategy,init_gates,final_gates";
    for (GateKind k : gs.kinds) {
        out += ',';
        out += kind_name(k);
    }
    out += ",iters,ms,verified\n";

    // Strategy blocks in first-appearance order.
    std::vector<Strategy> order;
    for (const RunSummary& run : r.runs)
        if (std::find(order.begin(), order.end(), run.strategy) == order.end())
            order.push_back(run.strategy);

    const size_t ncols = 4 + gs.kinds.size() + 3;  // numeric columns per row
    for (Strategy s : order) {
        std::vector<std::vector<double>> cols(ncols - 2);  // seed and strategy are labels
        for (const RunSummary& run : r.runs) {
            if (run.strategy != s) continue;
            out += std::to_string(run.seed);
            out += ',';
            out += strategy_name(s);
            std::vector<double> vals;
            vals.push_back(run.init_gates);
            vals.push_back(run.final_gates);
            for (size_t i = 0; i < gs.kinds.size(); ++i)
                vals.push_back(i < run.kind_counts.size() ? run.kind_counts[i] : 0);
            vals.push_back(run.iters);
            vals.push_back(run.ms);
            vals.push_back(run.verified ? 1.0 : 0.0);
            const size_t ms_index = gs.kinds.size() + 3;
            for (size_t i = 0; i < vals.size(); ++i) {
                out += ',';
                out += i == ms_index ? format_num(vals[i])  // ms keeps fractions
                                     : std::to_string(static_cast<long long>(vals[i]));
                cols[i].push_back(vals[i]);
            }
            out += '\n';
        }
        for (const char* label : {"mean", "std", "median", "q1", "q3"})
            append_aggregate(out, label, s, cols);
    }
    return out;
}

std::string convergence_csv(const BenchResult& r) {
    std::string out = "strategy,iter,median,q1,q3\n";
    for (const ConvergencePoint& p : r.convergence) {
        out += strategy_name(p.strategy);
        out += ',' + std::to_string(p.iter) + ',' + format_num(p.median) + ',' +
               format_num(p.q1) + ',' + format_num(p.q3) + '\n';
    }
    return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty()) {
            std::vector<std::string> cells;
            size_t c = 0;
            while (c <= line.size()) {
                size_t comma = line.find(',', c);
                if (comma == std::string_view::npos) comma = line.size();
                cells.emplace_back(line.substr(c, comma - c));
                c = comma + 1;
            }
            rows.push_back(std::move(cells));
        }
        pos = nl + 1;
    }
    return rows;
}

int bench_exit_code(const BenchResult& r) { return r.any_verify_failed ? 3 : 0; }

BenchResult bench_run(const GateSet& gs, const RewriteDB* db, const UNetModel* model,
                      const BenchConfig& cfg, const std::filesystem::path& out_dir,
                      std::ostream* progress) {
    cfg.validate(model != nullptr);
    // Anything optimize() would reject must surface here, before the pool.
    if (cfg.verify != VerifyMode::OFF && cfg.width > kQubitCap)
        throw ConfigError("verification needs width <= " + std::to_string(kQubitCap) +
                          "; rerun with verification off");
    if (db && db->gs.kinds != gs.kinds)
        throw ConfigError("rewrite database was built for a different gate set");
    if (model && model->gs.kinds != gs.kinds)
        throw ConfigError("attention model was trained for a different gate set");
    std::filesystem::create_directories(out_dir);

    struct Job {
        int circuit = 0;
        int strat = 0;
        OptimizeResult res;
        uint64_t circuit_seed = 0;
        int init_gates = 0;
        double ms = 0.0;
    };
    std::vector<Job> jobs(static_cast<size_t>(cfg.circuits) * cfg.strategies.size());
    for (int s = 0; s < static_cast<int>(cfg.strategies.size()); ++s)
        for (int i = 0; i < cfg.circuits; ++i) {
            Job& j = jobs[static_cast<size_t>(s) * cfg.circuits + i];
            j.circuit = i;
            j.strat = s;
            j.circuit_seed = derive_seed(cfg.seed, static_cast<uint64_t>(i), 0xBE);
        }

    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t idx = next.fetch_add(1);
            if (idx >= jobs.size()) return;
            Job& j = jobs[idx];
            Circuit c = random_circuit(cfg.width, cfg.length, gs, j.circuit_seed);
            j.init_gates = c.size();
            OptimizeConfig oc;
            oc.strategy = cfg.strategies[j.strat];
            oc.max_iterations = cfg.iters;
            oc.limits = cfg.limits;
            oc.use_synthesis = cfg.use_synthesis;
            oc.synth = cfg.synth;
            oc.verify = cfg.verify;
            oc.timing = cfg.timing;
            oc.seed = derive_seed(cfg.seed,
                                  static_cast<uint64_t>(j.circuit) * 64 + j.strat, 0xB1);
            const UNetModel* m = oc.strategy == Strategy::GUIDED ? model : nullptr;
            auto t0 = std::chrono::steady_clock::now();
            j.res = optimize(c, gs, db, m, oc);
            if (cfg.timing)
                j.ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
        }
    };
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    size_t nthreads = cfg.threads > 0 ? static_cast<size_t>(cfg.threads) : hw;
    nthreads = std::min(nthreads, jobs.size());
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    BenchResult result;
    for (const Job& j : jobs) {
        RunSummary run;
        run.seed = j.circuit_seed;
        run.strategy = cfg.strategies[j.strat];
        run.init_gates = j.init_gates;
        run.final_gates = j.res.circuit.size();
        for (GateKind k : gs.kinds) run.kind_counts.push_back(j.res.circuit.count_kind(k));
        run.iters = j.res.iterations;
        run.ms = j.ms;
        run.verified = j.res.verdict == VerifyStatus::PASSED;
        if (j.res.verdict == VerifyStatus::FAILED) result.any_verify_failed = true;
        result.runs.push_back(std::move(run));
    }

    for (int s = 0; s < static_cast<int>(cfg.strategies.size()); ++s) {
        for (int it = 0; it < cfg.iters; ++it) {
            std::vector<double> gates;
            for (int i = 0; i < cfg.circuits; ++i) {
                const ConvergenceTrace& tr =
                    jobs[static_cast<size_t>(s) * cfg.circuits + i].res.trace;
                if (it < static_cast<int>(tr.rows.size())) gates.push_back(tr.rows[it].gates);
            }
            if (gates.empty()) continue;
            ConvergencePoint p;
            p.strategy = cfg.strategies[s];
            p.iter = it;
            p.median = quantile(gates, 0.5);
            p.q1 = quantile(gates, 0.25);
            p.q3 = quantile(gates, 0.75);
            result.convergence.push_back(p);
        }
    }

    for (const Job& j : jobs)
        write_file(out_dir / trace_file_name(cfg.strategies[j.strat], j.circuit),
                   trace_to_csv(j.res.trace));
    write_file(out_dir / "summary.csv", summary_csv(result, gs));
    write_file(out_dir / "convergence.csv", convergence_csv(result));

    if (progress) {
        int failed = 0;
        for (const RunSummary& run : result.runs) failed += run.verified ? 0 : 1;
        *progress << "bench: " << result.runs.size() << " runs, "
                  << (result.any_verify_failed ? "verification FAILED" : "verification clean")
                  << " (" << failed << " unverified rows)\n";
    }
    return result;
}

}  // namespace qcopt
