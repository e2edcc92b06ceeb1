#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qcopt/gate.hpp"

namespace qcopt {

using Unitary = Eigen::MatrixXcd;

/// Hard cap on dense-matrix construction. 2^12 complex doubles squared is
/// ~256 MB; anything larger is a caller bug, not a workload.
inline constexpr int kQubitCap = 12;

/// Local (non-embedded) matrix of a gate: 2x2 or 4x4. Rotations follow the
/// half-angle convention exp(-i a G / 2); for two-qubit gates the first
/// operand is the high bit of the local index.
Eigen::MatrixXcd local_matrix(GateKind kind, double angle);

/// In-place U <- embed(g) * U. U must be 2^width x 2^width with qubit 0 as the
/// least significant index bit.
void apply_gate(Unitary& U, const Gate& g, int width);

/// Identity-embedded gate matrix at the given width.
Unitary gate_unitary(const Gate& g, int width, int cap = kQubitCap);

/// Ordered product gates[last] * ... * gates[0].
Unitary circuit_unitary(const Circuit& c, int cap = kQubitCap);

struct PhaseMatch {
    bool equal = false;
    double phase = 0.0;  // U ~ e^{i phase} V when equal
};

/// Tests min_phi |U - e^{i phi} V|_F <= tol with phi from trace alignment
/// (fallback to the largest entry of V when the trace vanishes).
PhaseMatch equal_up_to_phase(const Unitary& U, const Unitary& V, double tol);
PhaseMatch equal_up_to_phase(const Unitary& U, const Unitary& V);  // tol = 1e-8 * dim

/// sqrt(1 - |tr(V^dag U)|^2 / d^2), in [0,1]; 0 iff equal up to phase.
double hilbert_schmidt_distance(const Unitary& U, const Unitary& V);

/// Sub-circuit restricted to the wires it touches.
struct CompactedBlock {
    Circuit sub;              // width = |active|
    std::vector<int> active;  // sorted original wires; sub wire i was active[i]
    std::vector<int> local;   // original wire -> sub wire, -1 if dropped
};

/// Requires a nonempty sub-circuit (an empty block has no wire witness).
CompactedBlock compact(const Circuit& sub);

/// Inverse of compact: place sub's wire i onto wires[i] in a width-wide circuit.
Circuit embed(const Circuit& sub, const std::vector<int>& wires, int width);

}  // namespace qcopt
