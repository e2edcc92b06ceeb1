#include "qcopt/unet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "qcopt/binio.hpp"
#include "qcopt/errors.hpp"
#include "qcopt/schedule.hpp"

namespace qcopt {

namespace {

constexpr char kWeightsMagic[4] = {'Q', 'G', 'N', 'W'};
constexpr uint16_t kWeightsVersion = 1;

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<ConvSpec> architecture(int in_channels) {
    // Block order: E1, E2, bottleneck, D1 (32 up + 16 skip), D2 (16 up + 16
    // skip), 1x1 head. Two convs per block.
    std::vector<std::pair<int, int>> shapes = {
        {in_channels, 16}, {16, 16},  // E1
        {16, 16},          {16, 16},  // E2
        {16, 32},          {32, 32},  // bottleneck
        {48, 16},          {16, 16},  // D1
        {32, 16},          {16, 16},  // D2
    };
    std::vector<ConvSpec> convs;
    size_t off = 0;
    for (auto [in, out] : shapes) {
        ConvSpec s;
        s.in = in;
        s.out = out;
        s.k = 3;
        s.w_off = off;
        s.b_off = off + s.w_len();
        off = s.b_off + out;
        convs.push_back(s);
    }
    ConvSpec head;
    head.in = 16;
    head.out = 1;
    head.k = 1;
    head.w_off = off;
    head.b_off = off + head.w_len();
    convs.push_back(head);
    return convs;
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

void apply_dropout(Tensor3& a, double rate, Rng& rng, std::vector<uint8_t>* mask_out) {
    std::vector<uint8_t> mask(a.size());
    double keep_scale = 1.0 / (1.0 - rate);
    for (size_t i = 0; i < a.data.size(); ++i) {
        bool keep = rng.uniform_double() >= rate;
        mask[i] = keep ? 1 : 0;
        a.data[i] = keep ? a.data[i] * keep_scale : 0.0;
    }
    if (mask_out) *mask_out = std::move(mask);
}

void dropout_backward(Tensor3& g, const std::vector<uint8_t>& mask, double rate) {
    double keep_scale = 1.0 / (1.0 - rate);
    for (size_t i = 0; i < g.data.size(); ++i) g.data[i] = mask[i] ? g.data[i] * keep_scale : 0.0;
}

}  // namespace

namespace unet_detail {

Tensor3 conv_forward(const Tensor3& in, const ConvSpec& spec, const float* params,
                     std::vector<double>* cols_out) {
    const int k = spec.k, pad = k / 2, h = in.h, w = in.w;
    const int rows = spec.in * k * k, n = h * w;
    std::vector<double> cols_local;
    std::vector<double>& cols = cols_out ? *cols_out : cols_local;
    cols.assign(static_cast<size_t>(rows) * n, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double* col = cols.data() + static_cast<size_t>(y * w + x) * rows;
            int r = 0;
            for (int ci = 0; ci < spec.in; ++ci)
                for (int ky = 0; ky < k; ++ky) {
                    int iy = y + ky - pad;
                    for (int kx = 0; kx < k; ++kx, ++r) {
                        int ix = x + kx - pad;
                        if (iy >= 0 && iy < h && ix >= 0 && ix < w) col[r] = in.at(ci, iy, ix);
                    }
                }
        }

    MatRM W(spec.out, rows);
    for (int o = 0; o < spec.out; ++o)
        for (int r = 0; r < rows; ++r)
            W(o, r) = params[spec.w_off + static_cast<size_t>(o) * rows + r];

    Tensor3 out(spec.out, h, w);
    Eigen::Map<const Eigen::MatrixXd> C(cols.data(), rows, n);
    Eigen::Map<MatRM> O(out.data.data(), spec.out, n);
    O.noalias() = W * C;
    for (int o = 0; o < spec.out; ++o) O.row(o).array() += params[spec.b_off + o];
    return out;
}

Tensor3 conv_backward(const Tensor3& grad_out, const ConvSpec& spec, const float* params,
                      const std::vector<double>& cols, int in_h, int in_w, double* grad) {
    const int k = spec.k, pad = k / 2, h = grad_out.h, w = grad_out.w;
    const int rows = spec.in * k * k, n = h * w;

    Eigen::Map<const MatRM> G(grad_out.data.data(), spec.out, n);
    Eigen::Map<const Eigen::MatrixXd> C(cols.data(), rows, n);
    Eigen::Map<MatRM> dW(grad + spec.w_off, spec.out, rows);
    dW.noalias() += G * C.transpose();
    for (int o = 0; o < spec.out; ++o) grad[spec.b_off + o] += G.row(o).sum();

    MatRM W(spec.out, rows);
    for (int o = 0; o < spec.out; ++o)
        for (int r = 0; r < rows; ++r)
            W(o, r) = params[spec.w_off + static_cast<size_t>(o) * rows + r];
    Eigen::MatrixXd dC = W.transpose() * G;  // rows x n

    Tensor3 din(spec.in, in_h, in_w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int j = y * w + x;
            int r = 0;
            for (int ci = 0; ci < spec.in; ++ci)
                for (int ky = 0; ky < k; ++ky) {
                    int iy = y + ky - pad;
                    for (int kx = 0; kx < k; ++kx, ++r) {
                        int ix = x + kx - pad;
                        if (iy >= 0 && iy < in_h && ix >= 0 && ix < in_w)
                            din.at(ci, iy, ix) += dC(r, j);
                    }
                }
        }
    return din;
}

Tensor3 leaky(const Tensor3& x) {
    Tensor3 y = x;
    for (double& v : y.data)
        if (v < 0) v *= kLeakySlope;
    return y;
}

Tensor3 leaky_backward(const Tensor3& grad_out, const Tensor3& preact) {
    Tensor3 g = grad_out;
    for (size_t i = 0; i < g.data.size(); ++i)
        if (preact.data[i] < 0) g.data[i] *= kLeakySlope;  // matches the forward branch at 0
    return g;
}

Tensor3 maxpool2(const Tensor3& x, std::vector<int32_t>* argmax) {
    Tensor3 out(x.c, x.h / 2, x.w / 2);
    if (argmax) argmax->assign(out.size(), -1);
    for (int ch = 0; ch < x.c; ++ch)
        for (int y = 0; y < out.h; ++y)
            for (int xx = 0; xx < out.w; ++xx) {
                double best = -std::numeric_limits<double>::infinity();
                int32_t best_idx = -1;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        int32_t idx = (ch * x.h + 2 * y + dy) * x.w + 2 * xx + dx;
                        if (x.data[idx] > best) {
                            best = x.data[idx];
                            best_idx = idx;
                        }
                    }
                out.at(ch, y, xx) = best;
                if (argmax) (*argmax)[(static_cast<size_t>(ch) * out.h + y) * out.w + xx] = best_idx;
            }
    return out;
}

Tensor3 maxpool2_backward(const Tensor3& grad_out, const std::vector<int32_t>& argmax,
                          int in_h, int in_w) {
    Tensor3 din(grad_out.c, in_h, in_w);
    for (size_t i = 0; i < grad_out.data.size(); ++i) din.data[argmax[i]] += grad_out.data[i];
    return din;
}

Tensor3 upsample2(const Tensor3& x) {
    Tensor3 out(x.c, x.h * 2, x.w * 2);
    for (int ch = 0; ch < x.c; ++ch)
        for (int y = 0; y < out.h; ++y)
            for (int xx = 0; xx < out.w; ++xx) out.at(ch, y, xx) = x.at(ch, y / 2, xx / 2);
    return out;
}

Tensor3 upsample2_backward(const Tensor3& grad_out) {
    Tensor3 din(grad_out.c, grad_out.h / 2, grad_out.w / 2);
    for (int ch = 0; ch < grad_out.c; ++ch)
        for (int y = 0; y < grad_out.h; ++y)
            for (int xx = 0; xx < grad_out.w; ++xx)
                din.at(ch, y / 2, xx / 2) += grad_out.at(ch, y, xx);
    return din;
}

Tensor3 concat_channels(const Tensor3& a, const Tensor3& b) {
    Tensor3 out(a.c + b.c, a.h, a.w);
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
    return out;
}

void split_channels(const Tensor3& ab, Tensor3& da, Tensor3& db) {
    std::copy(ab.data.begin(), ab.data.begin() + da.data.size(), da.data.begin());
    std::copy(ab.data.begin() + da.data.size(), ab.data.end(), db.data.begin());
}

}  // namespace unet_detail

using namespace unet_detail;

UNetModel make_unet(const GateSet& gs, uint64_t seed) {
    UNetModel m;
    m.gs = gs;
    m.in_channels = grid_channel_layout(gs).total;
    m.convs = architecture(m.in_channels);
    const ConvSpec& last = m.convs.back();
    m.params.assign(last.b_off + last.out, 0.0f);
    Rng rng(seed);
    for (const ConvSpec& s : m.convs) {
        double bound = std::sqrt(6.0 / (static_cast<double>(s.in) * s.k * s.k));
        for (size_t i = 0; i < s.w_len(); ++i)
            m.params[s.w_off + i] = static_cast<float>(rng.uniform_double(-bound, bound));
        // biases stay zero
    }
    return m;
}

size_t unet_param_count(const GateSet& gs) {
    auto convs = architecture(grid_channel_layout(gs).total);
    return convs.back().b_off + convs.back().out;
}

Tensor3 unet_forward(const UNetModel& m, const Tensor3& x, bool training, Rng* rng,
                     UNetCache* cache, double dropout_rate) {
    if (x.c != m.in_channels)
        throw ConfigError("input channel count does not match the model");
    if (x.h % 4 != 0 || x.w % 4 != 0 || x.h == 0 || x.w == 0)
        throw ConfigError("input spatial dims must be nonzero multiples of 4");
    if (training && dropout_rate > 0 && !rng)
        throw ConfigError("training-mode forward needs an rng for dropout");

    UNetCache local;
    UNetCache& cc = cache ? *cache : local;
    cc.cols.assign(m.convs.size(), {});
    cc.preact.assign(m.convs.size(), {});
    cc.drop_mask.assign(5, {});
    cc.drop_rate = training ? dropout_rate : 0.0;
    cc.pool_argmax.assign(2, {});
    cc.input = x;

    auto conv_act = [&](const Tensor3& in, int ci) {
        cc.preact[ci] = conv_forward(in, m.convs[ci], m.params.data(), &cc.cols[ci]);
        return leaky(cc.preact[ci]);
    };
    auto drop = [&](Tensor3& a, int bi) {
        if (training && dropout_rate > 0) apply_dropout(a, dropout_rate, *rng, &cc.drop_mask[bi]);
    };

    Tensor3 a = conv_act(x, 0);
    a = conv_act(a, 1);
    drop(a, 0);
    Tensor3 skip1 = a;  // 16 x H x W
    a = maxpool2(a, &cc.pool_argmax[0]);
    a = conv_act(a, 2);
    a = conv_act(a, 3);
    drop(a, 1);
    Tensor3 skip2 = a;  // 16 x H/2 x W/2
    a = maxpool2(a, &cc.pool_argmax[1]);
    a = conv_act(a, 4);
    a = conv_act(a, 5);
    drop(a, 2);
    a = upsample2(a);
    a = concat_channels(a, skip2);  // 48 channels
    a = conv_act(a, 6);
    a = conv_act(a, 7);
    drop(a, 3);
    a = upsample2(a);
    a = concat_channels(a, skip1);  // 32 channels
    a = conv_act(a, 8);
    a = conv_act(a, 9);
    drop(a, 4);
    cc.logits = conv_forward(a, m.convs[10], m.params.data(), &cc.cols[10]);

    Tensor3 probs = cc.logits;
    for (double& v : probs.data) v = sigmoid(v);
    cc.probs = probs;
    return probs;
}

double masked_bce(const Tensor3& prob, const std::vector<float>& target,
                  const std::vector<uint8_t>& mask, Tensor3* grad_prob) {
    if (target.size() != prob.data.size() || mask.size() != prob.data.size())
        throw ConfigError("target/mask size does not match the output grid");
    if (grad_prob) *grad_prob = Tensor3(prob.c, prob.h, prob.w);
    size_t n = 0;
    for (uint8_t v : mask)
        if (v) ++n;
    if (n == 0) return 0.0;
    double loss = 0.0;
    for (size_t i = 0; i < prob.data.size(); ++i) {
        if (!mask[i]) continue;
        double p = prob.data[i], y = target[i];
        loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        if (grad_prob) {
            double denom = std::max(p * (1.0 - p), 1e-12);  // guards saturated cells
            grad_prob->data[i] = (p - y) / (denom * static_cast<double>(n));
        }
    }
    return loss / static_cast<double>(n);
}

std::vector<double> unet_backward(const UNetModel& m, const UNetCache& cache,
                                  const Tensor3& grad_prob) {
    std::vector<double> grad(m.params.size(), 0.0);
    const int H = cache.input.h, W = cache.input.w;
    const double rate = cache.drop_rate;

    Tensor3 dz = grad_prob;
    for (size_t i = 0; i < dz.data.size(); ++i) {
        double p = cache.probs.data[i];
        dz.data[i] *= p * (1.0 - p);
    }

    auto conv_act_bwd = [&](const Tensor3& g, int ci, int in_h, int in_w) {
        Tensor3 dpre = leaky_backward(g, cache.preact[ci]);
        return conv_backward(dpre, m.convs[ci], m.params.data(), cache.cols[ci], in_h, in_w,
                             grad.data());
    };
    auto drop_bwd = [&](Tensor3& g, int bi) {
        if (rate > 0) dropout_backward(g, cache.drop_mask[bi], rate);
    };

    // head (no activation)
    Tensor3 g = conv_backward(dz, m.convs[10], m.params.data(), cache.cols[10], H, W,
                              grad.data());
    drop_bwd(g, 4);
    g = conv_act_bwd(g, 9, H, W);
    g = conv_act_bwd(g, 8, H, W);  // grad wrt concat(up, skip1), 32 x H x W

    Tensor3 dup1(16, H, W), dskip1(16, H, W);
    split_channels(g, dup1, dskip1);
    g = upsample2_backward(dup1);  // 16 x H/2 x W/2
    drop_bwd(g, 3);
    g = conv_act_bwd(g, 7, H / 2, W / 2);
    g = conv_act_bwd(g, 6, H / 2, W / 2);  // grad wrt concat(up, skip2), 48 x H/2 x W/2

    Tensor3 dup2(32, H / 2, W / 2), dskip2(16, H / 2, W / 2);
    split_channels(g, dup2, dskip2);
    g = upsample2_backward(dup2);  // 32 x H/4 x W/4
    drop_bwd(g, 2);
    g = conv_act_bwd(g, 5, H / 4, W / 4);
    g = conv_act_bwd(g, 4, H / 4, W / 4);  // 16 x H/4 x W/4

    g = maxpool2_backward(g, cache.pool_argmax[1], H / 2, W / 2);
    for (size_t i = 0; i < g.data.size(); ++i) g.data[i] += dskip2.data[i];
    drop_bwd(g, 1);
    g = conv_act_bwd(g, 3, H / 2, W / 2);
    g = conv_act_bwd(g, 2, H / 2, W / 2);

    g = maxpool2_backward(g, cache.pool_argmax[0], H, W);
    for (size_t i = 0; i < g.data.size(); ++i) g.data[i] += dskip1.data[i];
    drop_bwd(g, 0);
    g = conv_act_bwd(g, 1, H, W);
    conv_act_bwd(g, 0, H, W);  // input gradient discarded
    return grad;
}

void TrainConfig::validate() const {
    if (batch < 1) throw ConfigError("batch size must be >= 1");
    if (!(lr >= 0) || !std::isfinite(lr)) throw ConfigError("learning rate must be finite and >= 0");
    if (epochs < 0) throw ConfigError("epoch count must be >= 0");
    if (!(dropout >= 0.0) || dropout >= 1.0) throw ConfigError("dropout must be in [0,1)");
}

void adam_step(UNetModel& model, AdamState& st, const std::vector<double>& grad,
               const TrainConfig& cfg) {
    if (st.m.empty()) {
        st.m.assign(model.params.size(), 0.0);
        st.v.assign(model.params.size(), 0.0);
    }
    st.t += 1;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
    for (size_t i = 0; i < model.params.size(); ++i) {
        double g = grad[i];
        st.m[i] = cfg.beta1 * st.m[i] + (1.0 - cfg.beta1) * g;
        st.v[i] = cfg.beta2 * st.v[i] + (1.0 - cfg.beta2) * g * g;
        double mhat = st.m[i] / bc1, vhat = st.v[i] / bc2;
        double p = static_cast<double>(model.params[i]);
        model.params[i] = static_cast<float>(p - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
}

std::vector<double> train_unet(UNetModel& m, const std::vector<TrainSample>& data,
                               const TrainConfig& cfg) {
    cfg.validate();
    if (data.empty()) throw ConfigError("cannot train on an empty dataset");
    for (const TrainSample& s : data) {
        if (s.x.c != m.in_channels) throw ConfigError("sample channel count does not match the model");
        size_t cells = static_cast<size_t>(s.x.h) * s.x.w;
        if (s.target.size() != cells || s.mask.size() != cells)
            throw ConfigError("sample target/mask size does not match its grid");
    }

    // Same-shape bucketing keeps batches homogeneous; bucket order is fixed.
    std::map<std::pair<int, int>, std::vector<int>> buckets;
    for (int i = 0; i < static_cast<int>(data.size()); ++i)
        buckets[{data[i].x.h, data[i].x.w}].push_back(i);

    AdamState st;
    Rng drop_rng(derive_seed(cfg.seed, 1, 0xD1));
    std::vector<double> history;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double loss_sum = 0.0;
        int seen = 0;
        int bucket_index = 0;
        for (auto& [shape, members] : buckets) {
            std::vector<int> order = members;
            Rng sh(derive_seed(cfg.seed, static_cast<uint64_t>(epoch) * 1000003 + bucket_index,
                               0x5A));
            sh.shuffle(order);
            ++bucket_index;
            for (size_t start = 0; start < order.size(); start += cfg.batch) {
                size_t stop = std::min(order.size(), start + cfg.batch);
                double bsz = static_cast<double>(stop - start);
                std::vector<double> grad_sum(m.params.size(), 0.0);
                for (size_t s = start; s < stop; ++s) {
                    const TrainSample& sample = data[order[s]];
                    UNetCache cache;
                    Tensor3 probs =
                        unet_forward(m, sample.x, true, &drop_rng, &cache, cfg.dropout);
                    Tensor3 gp;
                    double loss = masked_bce(probs, sample.target, sample.mask, &gp);
                    loss_sum += loss;
                    ++seen;
                    for (double& v : gp.data) v /= bsz;
                    std::vector<double> g = unet_backward(m, cache, gp);
                    for (size_t i = 0; i < g.size(); ++i) grad_sum[i] += g[i];
                }
                adam_step(m, st, grad_sum, cfg);
            }
        }
        history.push_back(seen ? loss_sum / seen : 0.0);
    }
    return history;
}

AttentionMap unet_infer(const UNetModel& m, const Circuit& c, const GateSet& gs) {
    if (gs.kinds != m.gs.kinds)
        throw ConfigError("model was trained for gate set '" + m.gs.name +
                          "', not '" + gs.name + "'");
    if (c.empty()) throw ConfigError("cannot infer attention for an empty circuit");
    Tensor3 x = encode_grid(c, gs);
    Tensor3 probs = unet_forward(m, x, false, nullptr, nullptr);
    SlotLayout layout = schedule(c);
    AttentionMap attn(layout.width, layout.depth);
    for (int q = 0; q < layout.width; ++q)
        for (int t = 0; t < layout.depth; ++t) attn.at(q, t) = probs.at(0, q, t);
    attn.validate();
    return attn;
}

void save_model(const UNetModel& m, const std::string& path) {
    ByteWriter w;
    write_gate_set(w, m.gs);
    w.u32(static_cast<uint32_t>(m.in_channels));
    w.u8(static_cast<uint8_t>(m.convs.size()));
    for (const ConvSpec& s : m.convs) {
        w.u16(static_cast<uint16_t>(s.in));
        w.u16(static_cast<uint16_t>(s.out));
        w.u8(static_cast<uint8_t>(s.k));
    }
    w.u64(m.params.size());
    for (float p : m.params) w.f32(p);
    write_file(path, frame_file(kWeightsMagic, kWeightsVersion, w.data()));
}

UNetModel load_model(const std::string& path) {
    std::string file = read_file(path);
    std::string_view payload = check_frame(kWeightsMagic, kWeightsVersion, file);
    ByteReader r(payload);

    UNetModel m;
    m.gs = read_gate_set(r);
    m.in_channels = static_cast<int>(r.u32());
    if (m.in_channels != grid_channel_layout(m.gs).total)
        throw IoError("weights file: channel count does not match the stored gate set");
    m.convs = architecture(m.in_channels);
    size_t n_convs = r.u8();
    if (n_convs != m.convs.size())
        throw IoError("weights file: architecture mismatch (conv count)");
    for (const ConvSpec& s : m.convs) {
        int in = r.u16(), out = r.u16(), k = r.u8();
        if (in != s.in || out != s.out || k != s.k)
            throw IoError("weights file: architecture mismatch (conv shape)");
    }
    size_t count = r.u64();
    if (count != unet_param_count(m.gs))
        throw IoError("weights file: parameter count does not match the architecture");
    m.params.resize(count);
    for (size_t i = 0; i < count; ++i) m.params[i] = r.f32();
    if (r.remaining() != 0) throw IoError("weights file: trailing bytes after parameters");
    return m;
}

}  // namespace qcopt
