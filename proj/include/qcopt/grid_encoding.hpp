#pragma once

#include <vector>

#include "qcopt/gate.hpp"
#include "qcopt/schedule.hpp"

namespace qcopt {

/// Dense channels-first tensor (planar layout) used for network inputs and
/// activations. Index (ch, y, x) -> ch*h*w + y*w + x.
struct Tensor3 {
    int c = 0, h = 0, w = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(int c_, int h_, int w_)
        : c(c_), h(h_), w(w_), data(static_cast<size_t>(c_) * h_ * w_, 0.0) {}

    double at(int ch, int y, int x) const {
        return data[(static_cast<size_t>(ch) * h + y) * w + x];
    }
    double& at(int ch, int y, int x) {
        return data[(static_cast<size_t>(ch) * h + y) * w + x];
    }
    size_t size() const { return data.size(); }
};

/// Channel layout of the circuit image. One one-hot channel per gate kind in
/// gate-set order, then two operand-role flags, the angle as (sin, cos), and
/// an occupancy flag. NISQ lands at 8 channels, the ion-trap set at 9.
struct GridChannels {
    int kind_base = 0;   // kinds occupy [kind_base, kind_base + kind_count)
    int kind_count = 0;
    int role_first = 0;  // set on a gate's first operand (every gate has one)
    int role_second = 0; // set on a two-qubit gate's second operand
    int angle_sin = 0;
    int angle_cos = 0;
    int occupancy = 0;
    int total = 0;
};

GridChannels grid_channel_layout(const GateSet& gs);

/// Next multiple of 4, never below 4 (two 2x2 pools need both spatial dims
/// divisible by 4).
int pad_to_four(int n);

/// Schedules the circuit and renders it as a GridChannels image of shape
/// total x pad(qubits) x pad(depth). Unused properties stay exactly 0;
/// padding cells are all-zero. A parameterized two-qubit gate writes its
/// angle channels on both operand cells.
Tensor3 encode_grid(const Circuit& c, const GateSet& gs);

}  // namespace qcopt
