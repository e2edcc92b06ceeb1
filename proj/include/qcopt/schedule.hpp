#pragma once

#include <optional>
#include <vector>

#include "qcopt/gate.hpp"

namespace qcopt {

/// ASAP slot assignment: each gate sits at 1 + the max slot of any earlier gate
/// sharing a qubit (0 if none). The (qubit, slot) grid holds at most one gate
/// index per cell; two-qubit gates occupy two cells in the same column.
struct SlotLayout {
    int width = 0;
    int depth = 0;
    std::vector<int> slots;  // per gate, parallel to circuit.gates
    std::vector<int> grid;   // width*depth, gate index or -1; cell (q,t) at q*depth + t

    int at(int q, int t) const { return grid[static_cast<size_t>(q) * depth + t]; }
};

SlotLayout schedule(const Circuit& c);

/// Reads the grid column-by-column (ties within a column broken by original
/// gate order). Unitary-equivalent reordering of the source circuit.
Circuit flatten(const Circuit& c, const SlotLayout& layout);

/// Inclusive rectangle on the slot grid.
struct Window {
    int q_lo = 0, q_hi = 0, t_lo = 0, t_hi = 0;

    int qubit_span() const { return q_hi - q_lo + 1; }
    int slot_span() const { return t_hi - t_lo + 1; }
    bool contains_row(int q) const { return q >= q_lo && q <= q_hi; }
    bool operator==(const Window&) const = default;
};

struct Segments {
    Circuit prefix, middle, suffix;  // all at the original width and wire indices
    std::vector<int> middle_qubits;  // sorted original wires touched by the middle
};

/// Cuts c into prefix/middle/suffix along the window. Middle = gates whose slot
/// is in [t_lo,t_hi] and whose wires all lie in [q_lo,q_hi]. In-range gates
/// entirely outside the wire rows join the prefix (they commute with every
/// middle gate). Returns nullopt when a gate straddles the row boundary while
/// its slot is in range: such a cut has no disjointness proof, so the window is
/// rejected rather than shrunk.
std::optional<Segments> split(const Circuit& c, const SlotLayout& layout, const Window& w);
std::optional<Segments> split(const Circuit& c, const Window& w);

/// prefix + remap(new_middle) + suffix at the original width. new_middle's wire
/// i becomes seg.middle_qubits[i]; its width must equal |middle_qubits|.
Circuit splice(const Segments& seg, const Circuit& new_middle);

}  // namespace qcopt
