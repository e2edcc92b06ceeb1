#include "qcopt/schedule.hpp"

#include <algorithm>

namespace qcopt {

SlotLayout schedule(const Circuit& c) {
    SlotLayout layout;
    layout.width = c.width;
    layout.slots.resize(c.gates.size());

    std::vector<int> frontier(c.width, 0);  // next free slot per wire
    int depth = 0;
    for (size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        int s = frontier[g.q0];
        if (g.q1 >= 0) s = std::max(s, frontier[g.q1]);
        layout.slots[i] = s;
        frontier[g.q0] = s + 1;
        if (g.q1 >= 0) frontier[g.q1] = s + 1;
        depth = std::max(depth, s + 1);
    }
    layout.depth = depth;

    layout.grid.assign(static_cast<size_t>(c.width) * depth, -1);
    for (size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        int s = layout.slots[i];
        layout.grid[static_cast<size_t>(g.q0) * depth + s] = static_cast<int>(i);
        if (g.q1 >= 0) layout.grid[static_cast<size_t>(g.q1) * depth + s] = static_cast<int>(i);
    }
    return layout;
}

Circuit flatten(const Circuit& c, const SlotLayout& layout) {
    Circuit out;
    out.width = c.width;
    out.gates.reserve(c.gates.size());
    for (int t = 0; t < layout.depth; ++t) {
        std::vector<int> column;
        for (int q = 0; q < layout.width; ++q) {
            int gi = layout.at(q, t);
            if (gi >= 0) column.push_back(gi);
        }
        std::sort(column.begin(), column.end());
        column.erase(std::unique(column.begin(), column.end()), column.end());
        for (int gi : column) out.gates.push_back(c.gates[gi]);
    }
    return out;
}

std::optional<Segments> split(const Circuit& c, const SlotLayout& layout, const Window& w) {
    Segments seg;
    seg.prefix.width = seg.middle.width = seg.suffix.width = c.width;

    for (size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        int s = layout.slots[i];
        if (s < w.t_lo) {
            seg.prefix.gates.push_back(g);
        } else if (s > w.t_hi) {
            seg.suffix.gates.push_back(g);
        } else {
            bool in0 = w.contains_row(g.q0);
            bool in1 = g.q1 < 0 ? in0 : w.contains_row(g.q1);
            if (in0 && in1) {
                seg.middle.gates.push_back(g);
            } else if (!in0 && !in1) {
                seg.prefix.gates.push_back(g);
            } else {
                return std::nullopt;  // straddles the row boundary
            }
        }
    }

    std::vector<int> touched;
    for (const Gate& g : seg.middle.gates) {
        touched.push_back(g.q0);
        if (g.q1 >= 0) touched.push_back(g.q1);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    seg.middle_qubits = std::move(touched);
    return seg;
}

std::optional<Segments> split(const Circuit& c, const Window& w) {
    return split(c, schedule(c), w);
}

Circuit splice(const Segments& seg, const Circuit& new_middle) {
    if (new_middle.width != static_cast<int>(seg.middle_qubits.size()))
        throw ConfigError("splice: replacement width " + std::to_string(new_middle.width) +
                          " != |middle_qubits| " + std::to_string(seg.middle_qubits.size()));
    Circuit out;
    out.width = seg.prefix.width;
    out.gates = seg.prefix.gates;
    for (Gate g : new_middle.gates) {
        g.q0 = seg.middle_qubits[g.q0];
        if (g.q1 >= 0) g.q1 = seg.middle_qubits[g.q1];
        out.gates.push_back(g);
    }
    out.gates.insert(out.gates.end(), seg.suffix.gates.begin(), seg.suffix.gates.end());
    return out;
}

}  // namespace qcopt
