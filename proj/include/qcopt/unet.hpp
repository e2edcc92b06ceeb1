#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcopt/gate.hpp"
#include "qcopt/grid_encoding.hpp"
#include "qcopt/rng.hpp"
#include "qcopt/sampler.hpp"

namespace qcopt {

/// One convolution's shape and its slice of the flat parameter vector.
/// Weights are stored row-major as w[out][in][ky][kx], followed by b[out].
struct ConvSpec {
    int in = 0, out = 0, k = 3;
    size_t w_off = 0, b_off = 0;
    size_t w_len() const { return static_cast<size_t>(out) * in * k * k; }
};

/// Encoder-decoder over the circuit image: two downsampling blocks (16, 16),
/// a 32-channel bottleneck, two upsampling blocks with skip concatenation,
/// and a 1x1 head squashed by a logistic. Every block is two 3x3 same-padded
/// convolutions, each followed by a leaky rectifier (slope 0.01); blocks are
/// followed by dropout during training. Parameters live in one flat float
/// vector in block order (E1, E2, bottleneck, D1, D2, head); all arithmetic
/// is done in double.
struct UNetModel {
    GateSet gs;
    int in_channels = 0;
    std::vector<ConvSpec> convs;  // 11 entries, fixed order
    std::vector<float> params;
};

inline constexpr double kLeakySlope = 0.01;
inline constexpr double kDropoutRate = 0.1;

/// Builds the architecture for a gate set with Kaiming-uniform weights
/// (bound sqrt(6 / fan_in)) and zero biases.
UNetModel make_unet(const GateSet& gs, uint64_t seed);

/// Parameter count implied by the gate set's channel count; asserted at load.
size_t unet_param_count(const GateSet& gs);

/// Activations recorded by a training-mode forward pass, consumed by
/// unet_backward. Dropout masks are stored so the backward pass reuses them
/// exactly.
struct UNetCache {
    Tensor3 input;
    std::vector<std::vector<double>> cols;      // per conv, im2col matrix data
    std::vector<Tensor3> preact;                // per conv, pre-activation
    std::vector<std::vector<uint8_t>> drop_mask;  // per block (5)
    double drop_rate = 0.0;
    std::vector<std::vector<int32_t>> pool_argmax;  // per pool (2)
    Tensor3 logits;
    Tensor3 probs;
};

/// Runs the network on a channels x H x W image (spatial dims divisible by
/// 4). Returns per-cell probabilities 1 x H x W, strictly inside (0,1).
/// training=true draws inverted-dropout masks from rng (required non-null)
/// and fills cache when given; training=false is deterministic and never
/// drops.
Tensor3 unet_forward(const UNetModel& m, const Tensor3& x, bool training, Rng* rng,
                     UNetCache* cache, double dropout_rate = kDropoutRate);

/// Mean binary cross-entropy over cells with mask != 0; cells outside the
/// mask contribute neither loss nor gradient. grad_prob (optional) receives
/// dLoss/dprob. target and mask are row-major H x W aligned with prob.
double masked_bce(const Tensor3& prob, const std::vector<float>& target,
                  const std::vector<uint8_t>& mask, Tensor3* grad_prob);

/// Gradient of a scalar loss with respect to every parameter, given the
/// loss gradient with respect to the forward output probabilities.
std::vector<double> unet_backward(const UNetModel& m, const UNetCache& cache,
                                  const Tensor3& grad_prob);

struct TrainSample {
    Tensor3 x;
    std::vector<float> target;  // padded H x W, row-major
    std::vector<uint8_t> mask;  // nonzero where the cell carries loss
};

struct TrainConfig {
    int batch = 20;
    double lr = 0.002;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    int epochs = 10;
    uint64_t seed = 0;
    double dropout = kDropoutRate;

    void validate() const;  // batch >= 1, lr >= 0, epochs >= 0
};

struct AdamState {
    std::vector<double> m, v;
    int64_t t = 0;
};

/// One Adam update over the flat parameter vector (double math, float store).
void adam_step(UNetModel& model, AdamState& st, const std::vector<double>& grad,
               const TrainConfig& cfg);

/// Mini-batch training with epoch shuffling. Samples are bucketed by spatial
/// shape so every batch is shape-homogeneous; gradients accumulate in
/// sample-index order. Returns the mean per-sample loss of each epoch.
/// Deterministic per cfg.seed.
std::vector<double> train_unet(UNetModel& m, const std::vector<TrainSample>& data,
                               const TrainConfig& cfg);

/// encode -> forward (no dropout) -> crop padding to the circuit's layout.
AttentionMap unet_infer(const UNetModel& m, const Circuit& c, const GateSet& gs);

/// Weight persistence: framed file with magic "QGNW", version, the gate set,
/// the architecture table, then the parameters as little-endian f32 in
/// storage order, trailing CRC32.
void save_model(const UNetModel& m, const std::string& path);
UNetModel load_model(const std::string& path);

/// Layer primitives, exposed for isolated gradient checks.
namespace unet_detail {

/// 3x3 (pad 1) or 1x1 (pad 0) same-padded convolution via im2col.
/// cols_out (optional) receives the im2col matrix data for reuse in backward.
Tensor3 conv_forward(const Tensor3& in, const ConvSpec& spec, const float* params,
                     std::vector<double>* cols_out);
/// Accumulates dW/db into grad (flat, same layout as params) and returns
/// dLoss/dInput. cols must come from the matching forward call.
Tensor3 conv_backward(const Tensor3& grad_out, const ConvSpec& spec, const float* params,
                      const std::vector<double>& cols, int in_h, int in_w, double* grad);
Tensor3 leaky(const Tensor3& x);
Tensor3 leaky_backward(const Tensor3& grad_out, const Tensor3& preact);
Tensor3 maxpool2(const Tensor3& x, std::vector<int32_t>* argmax);
Tensor3 maxpool2_backward(const Tensor3& grad_out, const std::vector<int32_t>& argmax,
                          int in_h, int in_w);
Tensor3 upsample2(const Tensor3& x);
Tensor3 upsample2_backward(const Tensor3& grad_out);
Tensor3 concat_channels(const Tensor3& a, const Tensor3& b);
void split_channels(const Tensor3& ab, Tensor3& da, Tensor3& db);

}  // namespace unet_detail

}  // namespace qcopt
