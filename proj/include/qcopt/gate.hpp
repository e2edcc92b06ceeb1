#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qcopt/errors.hpp"

namespace qcopt {

/// Gate kinds supported by the IR. Enum values double as the on-disk kind ids,
/// so they must never be reordered.
enum class GateKind : uint8_t {
    RX = 0,   // exp(-i a/2 X)
    RY = 1,   // exp(-i a/2 Y)
    RZ = 2,   // exp(-i a/2 Z)
    RXX = 3,  // exp(-i a/2 X#X)
    CZ = 4,   // diag(1,1,1,-1)
};

inline constexpr int kGateKindCount = 5;

constexpr int arity(GateKind k) { return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ ? 1 : 2; }
constexpr bool parameterized(GateKind k) { return k != GateKind::CZ; }

std::string_view kind_name(GateKind k);
GateKind kind_from_name(std::string_view name);  // throws ConfigError on unknown name

/// One gate instance. q1 is -1 for single-qubit kinds. Angles are raw radians,
/// never normalized by the IR.
struct Gate {
    GateKind kind;
    int q0 = 0;
    int q1 = -1;
    double angle = 0.0;

    static Gate rx(int q, double a) { return {GateKind::RX, q, -1, a}; }
    static Gate ry(int q, double a) { return {GateKind::RY, q, -1, a}; }
    static Gate rz(int q, double a) { return {GateKind::RZ, q, -1, a}; }
    static Gate rxx(int a_, int b, double ang) { return {GateKind::RXX, a_, b, ang}; }
    static Gate cz(int a_, int b) { return {GateKind::CZ, a_, b, 0.0}; }

    int arity() const { return qcopt::arity(kind); }
    bool touches(int q) const { return q0 == q || q1 == q; }
    bool shares_qubit(const Gate& o) const {
        return o.touches(q0) || (q1 >= 0 && o.touches(q1));
    }
    /// Same unordered qubit set (kind-agnostic).
    bool same_qubits(const Gate& o) const {
        if (arity() != o.arity()) return false;
        if (arity() == 1) return q0 == o.q0;
        return (q0 == o.q0 && q1 == o.q1) || (q0 == o.q1 && q1 == o.q0);
    }
    bool operator==(const Gate& o) const {
        return kind == o.kind && q0 == o.q0 && q1 == o.q1 && angle == o.angle;
    }
};

/// Named set of allowed gate kinds.
struct GateSet {
    std::string name;
    std::vector<GateKind> kinds;

    bool contains(GateKind k) const;
    /// Position of k in kinds, or -1.
    int index_of(GateKind k) const;
    int max_arity() const;

    static const GateSet& nisq();     // rx, rz, cz
    static const GateSet& iontrap();  // rx, ry, rz, rxx
};

/// Lookup by preset name ("nisq" or "iontrap"); throws ConfigError otherwise.
const GateSet& gate_set_by_name(std::string_view name);

/// A circuit is an ordered gate list over `width` wires. Width may exceed the
/// highest wire actually used.
struct Circuit {
    int width = 0;
    std::vector<Gate> gates;

    Circuit() = default;
    Circuit(int w, std::vector<Gate> g) : width(w), gates(std::move(g)) {}

    int size() const { return static_cast<int>(gates.size()); }
    bool empty() const { return gates.empty(); }
    int count_kind(GateKind k) const;

    /// Checks wire bounds, distinct operands, and q1 usage matching arity.
    /// Throws ConfigError naming the offending gate index.
    void validate() const;
};

bool gates_identical(const Circuit& a, const Circuit& b);

/// Uniform random circuit: per gate, kind uniform over the set, wires uniform
/// (distinct pair for two-qubit kinds), angle uniform in [0, 2pi) when the kind
/// is parameterized. Requires width >= 2 if the set has a two-qubit kind.
Circuit random_circuit(int width, int length, const GateSet& gs, uint64_t seed);

}  // namespace qcopt
