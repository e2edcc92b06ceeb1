#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qcopt/bench.hpp"
#include "qcopt/dataset.hpp"
#include "qcopt/errors.hpp"
#include "qcopt/grid_encoding.hpp"
#include "qcopt/optimizer.hpp"
#include "qcopt/qasm.hpp"
#include "qcopt/rewrite_db.hpp"
#include "qcopt/schedule.hpp"
#include "qcopt/unet.hpp"
#include "qcopt/unitary.hpp"

namespace py = pybind11;
using namespace qcopt;

namespace {

py::array_t<double> attention_to_numpy(const AttentionMap& a) {
    py::array_t<double> arr({a.qubits, a.slots});
    std::copy(a.values.begin(), a.values.end(), arr.mutable_data());
    return arr;
}

py::array_t<double> target_to_numpy(const LabeledSample& s) {
    py::array_t<double> arr({s.qubits, s.slots});
    double* p = arr.mutable_data();
    for (size_t i = 0; i < s.target.size(); ++i) p[i] = s.target[i];
    return arr;
}

py::array_t<double> tensor_to_numpy(const Tensor3& t) {
    py::array_t<double> arr({t.c, t.h, t.w});
    std::copy(t.data.begin(), t.data.end(), arr.mutable_data());
    return arr;
}

Strategy one_strategy(const std::string& name) {
    std::vector<Strategy> v = parse_strategies(name);
    if (v.size() != 1) throw ConfigError("expected a single strategy name, got '" + name + "'");
    return v.front();
}

OptimizeResult py_optimize(const Circuit& c, const GateSet& gs, const RewriteDB* db,
                           const UNetModel* model, const std::string& strategy, int iters,
                           double budget_s, int target, uint64_t seed, const std::string& verify,
                           bool synth) {
    OptimizeConfig cfg;
    cfg.strategy = one_strategy(strategy);
    cfg.max_iterations = iters;
    cfg.budget_s = budget_s;
    cfg.target_gates = target;
    cfg.seed = seed;
    cfg.verify = verify_mode_from_name(verify);
    cfg.use_synthesis = synth;
    py::gil_scoped_release release;
    return optimize(c, gs, db, model, cfg);
}

LabeledSample py_label_circuit(const Circuit& c, const GateSet& gs, const RewriteDB* db,
                               int probes, uint64_t seed, double blur, bool synth) {
    LabelConfig cfg;
    cfg.probes = probes;
    cfg.blur_sigma = blur;
    cfg.use_synthesis = synth;
    Rng rng(seed);
    py::gil_scoped_release release;
    return label_circuit(c, gs, db, cfg, rng);
}

Dataset py_generate_dataset(const GateSet& gs, const RewriteDB* db,
                            const std::filesystem::path& out, int count, int width, int length,
                            uint64_t seed, int chunk, int probes, double blur, bool synth) {
    GenerateConfig cfg;
    cfg.count = count;
    cfg.width = width;
    cfg.length = length;
    cfg.seed = seed;
    cfg.chunk = chunk;
    cfg.label.probes = probes;
    cfg.label.blur_sigma = blur;
    cfg.label.use_synthesis = synth;
    py::gil_scoped_release release;
    return generate_dataset(gs, db, cfg, out);
}

std::vector<double> py_train(UNetModel& m, const Dataset& ds, int epochs, int batch, double lr,
                             uint64_t seed) {
    std::vector<TrainSample> samples;
    samples.reserve(ds.samples.size());
    for (const LabeledSample& s : ds.samples) samples.push_back(to_train_sample(s, ds.gs));
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch = batch;
    cfg.lr = lr;
    cfg.seed = seed;
    py::gil_scoped_release release;
    return train_unet(m, samples, cfg);
}

}  // namespace

PYBIND11_MODULE(_qcopt, m) {
    m.doc() = "Windowed peephole optimizer for quantum circuits";
    m.attr("__version__") = "0.1.0";
    m.attr("QUBIT_CAP") = kQubitCap;

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    py::enum_<GateKind>(m, "GateKind")
        .value("RX", GateKind::RX)
        .value("RY", GateKind::RY)
        .value("RZ", GateKind::RZ)
        .value("RXX", GateKind::RXX)
        .value("CZ", GateKind::CZ);

    py::class_<Gate>(m, "Gate")
        .def_readonly("kind", &Gate::kind)
        .def_readonly("q0", &Gate::q0)
        .def_readonly("q1", &Gate::q1)
        .def_readonly("angle", &Gate::angle)
        .def_static("rx", &Gate::rx, py::arg("q"), py::arg("angle"))
        .def_static("ry", &Gate::ry, py::arg("q"), py::arg("angle"))
        .def_static("rz", &Gate::rz, py::arg("q"), py::arg("angle"))
        .def_static("rxx", &Gate::rxx, py::arg("a"), py::arg("b"), py::arg("angle"))
        .def_static("cz", &Gate::cz, py::arg("a"), py::arg("b"))
        .def("__eq__", [](const Gate& a, const Gate& b) { return a == b; })
        .def("__repr__", [](const Gate& g) {
            std::string r = std::string(kind_name(g.kind)) + "(q" + std::to_string(g.q0);
            if (g.q1 >= 0) r += ",q" + std::to_string(g.q1);
            if (parameterized(g.kind)) r += "," + std::to_string(g.angle);
            return r + ")";
        });

    py::class_<GateSet>(m, "GateSet")
        .def_readonly("name", &GateSet::name)
        .def_readonly("kinds", &GateSet::kinds)
        .def_static("nisq", &GateSet::nisq, py::return_value_policy::reference)
        .def_static("iontrap", &GateSet::iontrap, py::return_value_policy::reference)
        .def("__repr__", [](const GateSet& gs) { return "GateSet(" + gs.name + ")"; });
    m.def("gate_set_by_name", &gate_set_by_name, py::return_value_policy::reference);

    py::class_<Circuit>(m, "Circuit")
        .def(py::init<>())
        .def(py::init<int, std::vector<Gate>>(), py::arg("width"), py::arg("gates"))
        .def_readwrite("width", &Circuit::width)
        .def_readwrite("gates", &Circuit::gates)
        .def("__len__", &Circuit::size)
        .def("count_kind", &Circuit::count_kind)
        .def("validate", &Circuit::validate)
        .def("__repr__", [](const Circuit& c) {
            return "Circuit(width=" + std::to_string(c.width) +
                   ", gates=" + std::to_string(c.size()) + ")";
        });

    m.def("random_circuit", &random_circuit, py::arg("width"), py::arg("length"), py::arg("gs"),
          py::arg("seed"));
    m.def("parse_qasm", [](const std::string& text) { return parse_qasm(text); },
          py::arg("text"));
    m.def("emit_qasm", &emit_qasm, py::arg("circuit"));

    m.def("circuit_unitary", [](const Circuit& c) { return circuit_unitary(c); },
          py::arg("circuit"), "Dense unitary, qubit 0 as the least significant bit");
    m.def("equal_up_to_phase",
          [](const Unitary& U, const Unitary& V, double tol) {
              PhaseMatch pm = tol < 0 ? equal_up_to_phase(U, V) : equal_up_to_phase(U, V, tol);
              return pm.equal;
          },
          py::arg("U"), py::arg("V"), py::arg("tol") = -1.0);
    m.def("circuit_depth", [](const Circuit& c) { return schedule(c).depth; }, py::arg("circuit"),
          "Number of time slots in the ASAP layout");
    m.def("encode_grid", [](const Circuit& c, const GateSet& gs) {
              return tensor_to_numpy(encode_grid(c, gs));
          },
          py::arg("circuit"), py::arg("gs"),
          "Channels x qubits x slots tensor; the network input encoding");

    py::class_<RewriteDB>(m, "RewriteDB")
        .def_readonly("q", &RewriteDB::q)
        .def_readonly("depth", &RewriteDB::depth)
        .def_readonly("truncated", &RewriteDB::truncated)
        .def("__len__", &RewriteDB::size)
        .def("__repr__", [](const RewriteDB& db) {
            return "RewriteDB(q=" + std::to_string(db.q) + ", depth=" + std::to_string(db.depth) +
                   ", entries=" + std::to_string(db.size()) + ")";
        });
    m.def("build_db",
          [](const GateSet& gs, int q, int grid_divisor, int depth, size_t cap) {
              py::gil_scoped_release release;
              return build_db(gs, q, make_angle_grid(grid_divisor), depth, cap);
          },
          py::arg("gs"), py::arg("q"), py::arg("grid_divisor"), py::arg("depth"),
          py::arg("cap") = kDbDefaultCap,
          "Enumerate shortest decompositions on the pi/grid_divisor angle grid");
    m.def("save_db", &save_db, py::arg("db"), py::arg("path"));
    m.def("load_db", &load_db, py::arg("path"), py::arg("verify_entries") = false);

    py::class_<OptimizeResult>(m, "OptimizeResult")
        .def_readonly("circuit", &OptimizeResult::circuit)
        .def_readonly("iterations", &OptimizeResult::iterations)
        .def_readonly("accepted", &OptimizeResult::accepted)
        .def_readonly("stop_reason", &OptimizeResult::stop_reason)
        .def_property_readonly("verdict",
                               [](const OptimizeResult& r) {
                                   return std::string(verify_status_name(r.verdict));
                               })
        .def_property_readonly("trace_gates",
                               [](const OptimizeResult& r) {
                                   std::vector<int> g;
                                   g.reserve(r.trace.rows.size());
                                   for (const TraceRow& row : r.trace.rows) g.push_back(row.gates);
                                   return g;
                               })
        .def("trace_csv", [](const OptimizeResult& r) { return trace_to_csv(r.trace); });
    m.def("optimize", &py_optimize, py::arg("circuit"), py::arg("gs"), py::arg("db") = nullptr,
          py::arg("model") = nullptr, py::arg("strategy") = "2d", py::arg("iters") = 2000,
          py::arg("budget_s") = -1.0, py::arg("target") = -1, py::arg("seed") = 0,
          py::arg("verify") = "final", py::arg("synth") = false);

    py::class_<LabeledSample>(m, "LabeledSample")
        .def_readonly("circuit", &LabeledSample::circuit)
        .def_readonly("qubits", &LabeledSample::qubits)
        .def_readonly("slots", &LabeledSample::slots)
        .def_readonly("seed", &LabeledSample::seed)
        .def_readonly("probes", &LabeledSample::probes)
        .def_property_readonly("target", &target_to_numpy,
                               "qubits x slots reducibility heatmap in [0,1]");

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("gs", &Dataset::gs)
        .def_readonly("samples", &Dataset::samples)
        .def("__len__", [](const Dataset& d) { return d.samples.size(); });
    m.def("label_circuit", &py_label_circuit, py::arg("circuit"), py::arg("gs"),
          py::arg("db") = nullptr, py::arg("probes") = 0, py::arg("seed") = 0,
          py::arg("blur") = 0.0, py::arg("synth") = false,
          "Probe random windows and mark cells of gates a replacement removes");
    m.def("generate_dataset", &py_generate_dataset, py::arg("gs"), py::arg("db"), py::arg("out"),
          py::arg("count") = 2000, py::arg("width") = 8, py::arg("length") = 100,
          py::arg("seed") = 0, py::arg("chunk") = 500, py::arg("probes") = 0,
          py::arg("blur") = 0.0, py::arg("synth") = false);
    m.def("save_dataset", &save_dataset, py::arg("dataset"), py::arg("path"));
    m.def("load_dataset", &load_dataset, py::arg("path"));

    py::class_<UNetModel>(m, "UNetModel")
        .def_readonly("gs", &UNetModel::gs)
        .def("__repr__", [](const UNetModel& u) { return "UNetModel(" + u.gs.name + ")"; });
    m.def("make_unet", &make_unet, py::arg("gs"), py::arg("seed"));
    m.def("train", &py_train, py::arg("model"), py::arg("dataset"), py::arg("epochs") = 10,
          py::arg("batch") = 20, py::arg("lr") = 0.002, py::arg("seed") = 0,
          "Fit in place; returns the per-epoch mean loss");
    m.def("infer",
          [](const UNetModel& mdl, const Circuit& c, const GateSet& gs) {
              return attention_to_numpy(unet_infer(mdl, c, gs));
          },
          py::arg("model"), py::arg("circuit"), py::arg("gs"),
          "qubits x slots attention map in (0,1)");
    m.def("save_model",
          [](const UNetModel& mdl, const std::filesystem::path& path) {
              save_model(mdl, path.string());
          },
          py::arg("model"), py::arg("path"));
    m.def("load_model",
          [](const std::filesystem::path& path) { return load_model(path.string()); },
          py::arg("path"));
}
