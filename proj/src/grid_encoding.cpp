#include "qcopt/grid_encoding.hpp"

#include <cmath>

#include "qcopt/errors.hpp"

namespace qcopt {

GridChannels grid_channel_layout(const GateSet& gs) {
    GridChannels ch;
    ch.kind_base = 0;
    ch.kind_count = static_cast<int>(gs.kinds.size());
    ch.role_first = ch.kind_count;
    ch.role_second = ch.kind_count + 1;
    ch.angle_sin = ch.kind_count + 2;
    ch.angle_cos = ch.kind_count + 3;
    ch.occupancy = ch.kind_count + 4;
    ch.total = ch.kind_count + 5;
    return ch;
}

int pad_to_four(int n) {
    if (n <= 4) return 4;
    return (n + 3) / 4 * 4;
}

Tensor3 encode_grid(const Circuit& c, const GateSet& gs) {
    c.validate();
    GridChannels ch = grid_channel_layout(gs);
    SlotLayout layout = schedule(c);
    Tensor3 x(ch.total, pad_to_four(layout.width), pad_to_four(layout.depth));

    for (size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        int kind_idx = gs.index_of(g.kind);
        if (kind_idx < 0)
            throw ConfigError("circuit uses a gate kind outside the gate set");
        int t = layout.slots[i];
        bool param = parameterized(g.kind);

        auto fill = [&](int q, int role_channel) {
            x.at(ch.kind_base + kind_idx, q, t) = 1.0;
            x.at(role_channel, q, t) = 1.0;
            if (param) {
                x.at(ch.angle_sin, q, t) = std::sin(g.angle);
                x.at(ch.angle_cos, q, t) = std::cos(g.angle);
            }
            x.at(ch.occupancy, q, t) = 1.0;
        };
        fill(g.q0, ch.role_first);
        if (arity(g.kind) == 2) fill(g.q1, ch.role_second);
    }
    return x;
}

}  // namespace qcopt
