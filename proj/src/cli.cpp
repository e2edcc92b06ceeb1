#include "qcopt/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <optional>
#include <ostream>

#include "qcopt/bench.hpp"
#include "qcopt/binio.hpp"
#include "qcopt/dataset.hpp"
#include "qcopt/errors.hpp"
#include "qcopt/optimizer.hpp"
#include "qcopt/qasm.hpp"
#include "qcopt/rewrite_db.hpp"
#include "qcopt/unet.hpp"

namespace qcopt {
namespace {

using nlohmann::json;

// "pi/4" or a bare divisor like "4"; the grid is the nonzero multiples of
// pi/divisor in (-pi, pi].
int parse_grid_divisor(const std::string& s) {
    std::string digits = s;
    if (s.rfind("pi/", 0) == 0) digits = s.substr(3);
    try {
        size_t used = 0;
        int d = std::stoi(digits, &used);
        if (used != digits.size() || d < 1) throw std::invalid_argument(s);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad angle grid '" + s + "': expected pi/N or a positive integer N");
    }
}

Strategy parse_one_strategy(const std::string& s) {
    std::vector<Strategy> v = parse_strategies(s);
    if (v.size() != 1) throw ConfigError("--strategy takes a single name, got '" + s + "'");
    return v.front();
}

struct OptimizeFlags {
    std::string in, out, gateset, db, weights, strategy;
    std::string trace, verify = "final", timing = "none";
    int iters = 2000;
    double budget_s = -1.0;
    int target = -1;
    uint64_t seed = 0;
    bool synth = false;
};

int cmd_optimize(const OptimizeFlags& f, std::ostream& out) {
    const GateSet& gs = gate_set_by_name(f.gateset);
    Circuit c = parse_qasm(read_file(f.in));
    RewriteDB db = load_db(f.db);
    std::optional<UNetModel> model;
    if (!f.weights.empty()) model = load_model(f.weights);

    OptimizeConfig cfg;
    cfg.strategy = parse_one_strategy(f.strategy);
    cfg.max_iterations = f.iters;
    cfg.budget_s = f.budget_s;
    cfg.target_gates = f.target;
    cfg.verify = verify_mode_from_name(f.verify);
    cfg.seed = f.seed;
    cfg.use_synthesis = f.synth;
    cfg.timing = f.timing == "wall";

    OptimizeResult res = optimize(c, gs, &db, model ? &*model : nullptr, cfg);

    write_file(f.out, emit_qasm(res.circuit));
    if (!f.trace.empty()) write_file(f.trace, trace_to_csv(res.trace));

    out << "initial gates: " << c.size() << "\n";
    out << "final gates: " << res.circuit.size() << "\n";
    for (GateKind k : gs.kinds)
        out << "  " << kind_name(k) << " " << res.circuit.count_kind(k) << "\n";
    out << "verification: " << verify_status_name(res.verdict) << "\n";
    out << "stop reason: " << res.stop_reason << "\n";
    return res.verdict == VerifyStatus::FAILED ? 2 : 0;
}

struct BenchFlags {
    std::string gateset, db, weights, strategies, out_dir;
    std::string verify = "final", timing = "none";
    int circuits = 100, width = 8, length = 100, iters = 2000, threads = 0;
    uint64_t seed = 0;
    bool synth = false;
};

int cmd_bench(const BenchFlags& f, std::ostream& out) {
    const GateSet& gs = gate_set_by_name(f.gateset);
    RewriteDB db = load_db(f.db);
    std::optional<UNetModel> model;
    if (!f.weights.empty()) model = load_model(f.weights);

    BenchConfig cfg;
    cfg.circuits = f.circuits;
    cfg.width = f.width;
    cfg.length = f.length;
    cfg.strategies = parse_strategies(f.strategies);
    cfg.iters = f.iters;
    cfg.seed = f.seed;
    cfg.use_synthesis = f.synth;
    cfg.verify = verify_mode_from_name(f.verify);
    cfg.timing = f.timing == "wall";
    cfg.threads = f.threads;

    BenchResult r = bench_run(gs, &db, model ? &*model : nullptr, cfg, f.out_dir, &out);
    return bench_exit_code(r);
}

struct DbBuildFlags {
    std::string gateset, grid = "pi/4", out;
    int q = 1, depth = 3;
    size_t cap = kDbDefaultCap;
};

int cmd_db_build(const DbBuildFlags& f, std::ostream& out) {
    const GateSet& gs = gate_set_by_name(f.gateset);
    int divisor = parse_grid_divisor(f.grid);
    RewriteDB db = build_db(gs, f.q, make_angle_grid(divisor), f.depth, f.cap);
    save_db(db, f.out);
    json j{{"command", "db-build"},      {"gateset", gs.name},
           {"q", f.q},                   {"depth", f.depth},
           {"grid", "pi/" + std::to_string(divisor)},
           {"entries", db.size()},       {"truncated", db.truncated},
           {"path", f.out}};
    out << j.dump() << "\n";
    return 0;
}

struct GenDatasetFlags {
    std::string gateset, db, out;
    int count = 2000, width = 8, length = 100, chunk = 500, probes = 0;
    uint64_t seed = 0;
    double blur = 0.0;
    bool synth = false;
};

int cmd_gen_dataset(const GenDatasetFlags& f, std::ostream& out, std::ostream& err) {
    const GateSet& gs = gate_set_by_name(f.gateset);
    std::optional<RewriteDB> db;
    if (!f.db.empty()) db = load_db(f.db);

    GenerateConfig cfg;
    cfg.count = f.count;
    cfg.width = f.width;
    cfg.length = f.length;
    cfg.seed = f.seed;
    cfg.chunk = f.chunk;
    cfg.label.probes = f.probes;
    cfg.label.blur_sigma = f.blur;
    cfg.label.use_synthesis = f.synth;

    Dataset ds = generate_dataset(gs, db ? &*db : nullptr, cfg, f.out, &err);
    json j{{"command", "gen-dataset"}, {"gateset", gs.name},
           {"samples", ds.samples.size()}, {"width", f.width},
           {"length", f.length},       {"path", f.out}};
    out << j.dump() << "\n";
    return 0;
}

struct TrainFlags {
    std::string data, out, loss_csv;
    int epochs = 10, batch = 20;
    double lr = 0.002;
    uint64_t seed = 0;
};

int cmd_train(const TrainFlags& f, std::ostream& out) {
    Dataset ds = load_dataset(f.data);
    std::vector<TrainSample> samples;
    samples.reserve(ds.samples.size());
    for (const LabeledSample& s : ds.samples) samples.push_back(to_train_sample(s, ds.gs));

    UNetModel m = make_unet(ds.gs, f.seed);
    TrainConfig cfg;
    cfg.batch = f.batch;
    cfg.lr = f.lr;
    cfg.epochs = f.epochs;
    cfg.seed = f.seed;
    std::vector<double> losses = train_unet(m, samples, cfg);
    save_model(m, f.out);

    if (!f.loss_csv.empty()) {
        std::string csv = "epoch,mean_loss\n";
        for (size_t i = 0; i < losses.size(); ++i) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i + 1, losses[i]);
            csv += buf;
        }
        write_file(f.loss_csv, csv);
    }

    json j{{"command", "train"},
           {"gateset", ds.gs.name},
           {"samples", samples.size()},
           {"epochs", f.epochs},
           {"first_loss", losses.empty() ? json() : json(losses.front())},
           {"final_loss", losses.empty() ? json() : json(losses.back())},
           {"path", f.out}};
    out << j.dump() << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qcopt: windowed peephole optimizer for quantum circuits"};
    app.name("qcopt");
    app.require_subcommand(1);

    OptimizeFlags of;
    CLI::App* opt = app.add_subcommand("optimize", "Shorten one circuit, QASM in / QASM out");
    opt->add_option("--in", of.in, "input QASM file")->required();
    opt->add_option("--out", of.out, "output QASM file")->required();
    opt->add_option("--gateset", of.gateset, "nisq or iontrap")->required();
    opt->add_option("--db", of.db, "rewrite database file")->required();
    opt->add_option("--weights", of.weights, "attention model weights (guided strategy)");
    opt->add_option("--strategy", of.strategy, "1d, 2d, or guided")->required();
    opt->add_option("--iters", of.iters, "iteration budget; negative disables")->capture_default_str();
    opt->add_option("--budget-s", of.budget_s, "wall-clock budget in seconds");
    opt->add_option("--target", of.target, "stop once the gate count reaches this");
    opt->add_option("--seed", of.seed, "rng seed")->capture_default_str();
    opt->add_option("--trace", of.trace, "write the per-iteration trace CSV here");
    opt->add_option("--verify", of.verify, "every, final, or off")->capture_default_str();
    opt->add_option("--timing", of.timing, "none or wall; wall breaks byte-reproducibility")->capture_default_str();
    opt->add_flag("--synth", of.synth, "enable continuous-angle synthesis fallback");

    BenchFlags bf;
    CLI::App* ben = app.add_subcommand("bench", "Compare strategies over random circuits");
    ben->add_option("--gateset", bf.gateset, "nisq or iontrap")->required();
    ben->add_option("--db", bf.db, "rewrite database file")->required();
    ben->add_option("--weights", bf.weights, "attention model weights (guided strategy)");
    ben->add_option("--circuits", bf.circuits, "number of random circuits")->capture_default_str();
    ben->add_option("--width", bf.width, "qubits per circuit")->capture_default_str();
    ben->add_option("--length", bf.length, "gates per circuit")->capture_default_str();
    ben->add_option("--strategies", bf.strategies, "comma list from {1d,2d,guided}")->required();
    ben->add_option("--iters", bf.iters, "iterations per run")->capture_default_str();
    ben->add_option("--seed", bf.seed, "rng seed")->capture_default_str();
    ben->add_option("--out-dir", bf.out_dir, "directory for summary/convergence/trace CSVs")
        ->required();
    ben->add_option("--verify", bf.verify, "every, final, or off")->capture_default_str();
    ben->add_option("--timing", bf.timing, "none or wall; wall breaks byte-reproducibility")->capture_default_str();
    ben->add_option("--threads", bf.threads, "worker threads; 0 = hardware")->capture_default_str();
    ben->add_flag("--synth", bf.synth, "enable continuous-angle synthesis fallback");

    DbBuildFlags df;
    CLI::App* dbb = app.add_subcommand("db-build", "Enumerate shortest decompositions");
    dbb->add_option("--gateset", df.gateset, "nisq or iontrap")->required();
    dbb->add_option("--q", df.q, "wire count (1..3)")->capture_default_str();
    dbb->add_option("--depth", df.depth, "max decomposition length")->capture_default_str();
    dbb->add_option("--grid", df.grid, "angle grid, e.g. pi/4")->capture_default_str();
    dbb->add_option("--cap", df.cap, "entry cap; exceeding it truncates the last length")->capture_default_str();
    dbb->add_option("--out", df.out, "output database file")->required();

    GenDatasetFlags gf;
    CLI::App* gen = app.add_subcommand("gen-dataset", "Label random circuits by probing");
    gen->add_option("--gateset", gf.gateset, "nisq or iontrap")->required();
    gen->add_option("--db", gf.db, "rewrite database used by the prober");
    gen->add_option("--count", gf.count, "number of samples")->capture_default_str();
    gen->add_option("--width", gf.width, "qubits per circuit")->capture_default_str();
    gen->add_option("--length", gf.length, "gates per circuit")->capture_default_str();
    gen->add_option("--seed", gf.seed, "rng seed")->capture_default_str();
    gen->add_option("--chunk", gf.chunk, "samples per resumable chunk")->capture_default_str();
    gen->add_option("--probes", gf.probes, "windows per circuit; 0 = twice the cell count")->capture_default_str();
    gen->add_option("--blur", gf.blur, "gaussian blur sigma for the targets")->capture_default_str();
    gen->add_flag("--synth", gf.synth, "enable continuous-angle synthesis in the prober");
    gen->add_option("--out", gf.out, "output dataset file")->required();

    TrainFlags tf;
    CLI::App* trn = app.add_subcommand("train", "Fit the attention model to a dataset");
    trn->add_option("--data", tf.data, "dataset file")->required();
    trn->add_option("--out", tf.out, "output weights file")->required();
    trn->add_option("--epochs", tf.epochs, "training epochs")->capture_default_str();
    trn->add_option("--batch", tf.batch, "mini-batch size")->capture_default_str();
    trn->add_option("--lr", tf.lr, "learning rate")->capture_default_str();
    trn->add_option("--seed", tf.seed, "rng seed")->capture_default_str();
    trn->add_option("--loss-csv", tf.loss_csv, "write per-epoch mean loss here");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(std::move(rev));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    // Fail before any file IO when the strategy choice cannot work.
    if (opt->parsed() && of.strategy == "guided" && of.weights.empty()) {
        err << "error: the guided strategy needs --weights\n";
        return 1;
    }
    if (ben->parsed() && bf.strategies.find("guided") != std::string::npos &&
        bf.weights.empty()) {
        err << "error: the guided strategy needs --weights\n";
        return 1;
    }

    try {
        if (opt->parsed()) return cmd_optimize(of, out);
        if (ben->parsed()) return cmd_bench(bf, out);
        if (dbb->parsed()) return cmd_db_build(df, out);
        if (gen->parsed()) return cmd_gen_dataset(gf, out, err);
        if (trn->parsed()) return cmd_train(tf, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace qcopt
