#include "qcopt/gate.hpp"

#include <algorithm>

#include "qcopt/rng.hpp"

namespace qcopt {

std::string_view kind_name(GateKind k) {
    switch (k) {
        case GateKind::RX: return "rx";
        case GateKind::RY: return "ry";
        case GateKind::RZ: return "rz";
        case GateKind::RXX: return "rxx";
        case GateKind::CZ: return "cz";
    }
    return "?";
}

GateKind kind_from_name(std::string_view name) {
    for (int i = 0; i < kGateKindCount; ++i) {
        auto k = static_cast<GateKind>(i);
        if (kind_name(k) == name) return k;
    }
    throw ConfigError("unknown gate kind: " + std::string(name));
}

bool GateSet::contains(GateKind k) const {
    return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
}

int GateSet::index_of(GateKind k) const {
    auto it = std::find(kinds.begin(), kinds.end(), k);
    return it == kinds.end() ? -1 : static_cast<int>(it - kinds.begin());
}

int GateSet::max_arity() const {
    int m = 0;
    for (GateKind k : kinds) m = std::max(m, arity(k));
    return m;
}

const GateSet& GateSet::nisq() {
    static const GateSet gs{"nisq", {GateKind::RX, GateKind::RZ, GateKind::CZ}};
    return gs;
}

const GateSet& GateSet::iontrap() {
    static const GateSet gs{"iontrap", {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::RXX}};
    return gs;
}

const GateSet& gate_set_by_name(std::string_view name) {
    if (name == "nisq") return GateSet::nisq();
    if (name == "iontrap") return GateSet::iontrap();
    throw ConfigError("unknown gate set: " + std::string(name) + " (expected nisq or iontrap)");
}

int Circuit::count_kind(GateKind k) const {
    return static_cast<int>(std::count_if(gates.begin(), gates.end(),
                                          [k](const Gate& g) { return g.kind == k; }));
}

void Circuit::validate() const {
    if (width < 0) throw ConfigError("negative circuit width");
    for (size_t i = 0; i < gates.size(); ++i) {
        const Gate& g = gates[i];
        auto bad = [&](const std::string& why) {
            throw ConfigError("gate " + std::to_string(i) + " (" + std::string(kind_name(g.kind)) +
                              "): " + why);
        };
        if (g.q0 < 0 || g.q0 >= width) bad("wire q0 out of range");
        if (g.arity() == 2) {
            if (g.q1 < 0 || g.q1 >= width) bad("wire q1 out of range");
            if (g.q0 == g.q1) bad("identical operands");
        } else if (g.q1 != -1) {
            bad("single-qubit gate with q1 set");
        }
    }
}

bool gates_identical(const Circuit& a, const Circuit& b) {
    return a.width == b.width && a.gates == b.gates;
}

Circuit random_circuit(int width, int length, const GateSet& gs, uint64_t seed) {
    if (width < 1) throw ConfigError("random_circuit: width must be >= 1");
    if (length < 0) throw ConfigError("random_circuit: negative length");
    if (gs.kinds.empty()) throw ConfigError("random_circuit: empty gate set");
    if (gs.max_arity() > width)
        throw ConfigError("random_circuit: two-qubit kinds need width >= 2");

    Rng rng(seed);
    Circuit c;
    c.width = width;
    c.gates.reserve(length);
    for (int i = 0; i < length; ++i) {
        GateKind k = rng.pick(gs.kinds);
        Gate g{k, 0, -1, 0.0};
        g.q0 = rng.uniform_int(0, width - 1);
        if (arity(k) == 2) {
            g.q1 = rng.uniform_int(0, width - 2);
            if (g.q1 >= g.q0) ++g.q1;
        }
        if (parameterized(k)) g.angle = rng.uniform_double(0.0, 2.0 * 3.14159265358979323846);
        c.gates.push_back(g);
    }
    return c;
}

}  // namespace qcopt
