#include "qcopt/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qcopt {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
    double r = std::remainder(a, 2 * kPi);
    if (r <= -kPi) r += 2 * kPi;
    return r;
}
}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double step, int max_evals) {
    const size_t n = x0.size();
    NelderMeadResult res;
    if (n == 0) {
        res.x = x0;
        res.value = f(x0);
        res.evals = 1;
        return res;
    }

    struct Vertex {
        std::vector<double> x;
        double fx;
    };
    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };

    simplex.push_back({x0, eval(x0)});
    for (size_t i = 0; i < n; ++i) {
        std::vector<double> x = x0;
        x[i] += step;
        simplex.push_back({x, eval(x)});
    }

    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    while (evals < max_evals) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });
        if (simplex.back().fx - simplex.front().fx < 1e-14) break;

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            for (size_t v = 0; v < n; ++v) centroid[i] += simplex[v].x[i];
            centroid[i] /= static_cast<double>(n);
        }
        const Vertex& worst = simplex.back();

        auto blend = [&](double t) {
            std::vector<double> x(n);
            for (size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (centroid[i] - worst.x[i]);
            return x;
        };

        std::vector<double> xr = blend(alpha);
        double fr = eval(xr);
        if (fr < simplex.front().fx) {
            std::vector<double> xe = blend(gamma);
            double fe = eval(xe);
            if (fe < fr)
                simplex.back() = {std::move(xe), fe};
            else
                simplex.back() = {std::move(xr), fr};
        } else if (fr < simplex[n - 1].fx) {
            simplex.back() = {std::move(xr), fr};
        } else {
            std::vector<double> xc = blend(-rho);
            double fc = eval(xc);
            if (fc < worst.fx) {
                simplex.back() = {std::move(xc), fc};
            } else {
                for (size_t v = 1; v <= n; ++v) {
                    for (size_t i = 0; i < n; ++i)
                        simplex[v].x[i] =
                            simplex[0].x[i] + sigma * (simplex[v].x[i] - simplex[0].x[i]);
                    simplex[v].fx = eval(simplex[v].x);
                    if (evals >= max_evals) break;
                }
            }
        }
    }

    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });
    res.x = simplex.front().x;
    res.value = simplex.front().fx;
    res.evals = evals;
    return res;
}

std::optional<Circuit> synthesize_shorter(const Unitary& U, const GateSet& gs, int current_len,
                                          const SynthesisConfig& cfg, const RewriteDB* db,
                                          Rng& rng) {
    int q = 0;
    while ((Eigen::Index{1} << q) < U.rows()) ++q;
    if ((Eigen::Index{1} << q) != U.rows() || q > 3)
        throw ConfigError("synthesize_shorter: dimension must be 2^q with q <= 3");

    if (db && db->q == q) {
        if (auto hit = db->lookup(U); hit && hit->size() < current_len) return hit;
    }

    const std::vector<Gate> placements = enumerate_placements(gs, q);
    const int max_len = std::min(current_len - 1, cfg.max_length);

    for (int len = 0; len <= max_len; ++len) {
        if (len == 0) {
            Unitary ident = Unitary::Identity(U.rows(), U.cols());
            if (hilbert_schmidt_distance(ident, U) <= cfg.eps) return Circuit{q, {}};
            continue;
        }
        if (placements.empty()) break;

        // Odometer over placement indices = lexicographic skeleton order.
        std::vector<size_t> sel(len, 0);
        while (true) {
            Circuit skel{q, {}};
            std::vector<size_t> param_pos;
            for (int i = 0; i < len; ++i) {
                skel.gates.push_back(placements[sel[i]]);
                if (parameterized(skel.gates.back().kind)) param_pos.push_back(i);
            }

            auto objective = [&](const std::vector<double>& angles) {
                Circuit c = skel;
                for (size_t i = 0; i < param_pos.size(); ++i)
                    c.gates[param_pos[i]].angle = angles[i];
                return hilbert_schmidt_distance(circuit_unitary(c), U);
            };

            int restarts = param_pos.empty() ? 1 : std::max(1, cfg.restarts);
            int per_restart = std::max(50, cfg.eval_budget / restarts);
            for (int r = 0; r < restarts; ++r) {
                std::vector<double> x0(param_pos.size());
                for (double& v : x0) v = rng.uniform_double(0.0, 2 * kPi);
                NelderMeadResult best = nelder_mead(objective, std::move(x0), 0.5, per_restart);
                if (best.value <= cfg.eps) {
                    Circuit out = skel;
                    for (size_t i = 0; i < param_pos.size(); ++i)
                        out.gates[param_pos[i]].angle = wrap_angle(best.x[i]);
                    // Wrapping is exact up to global phase; re-verify anyway.
                    if (hilbert_schmidt_distance(circuit_unitary(out), U) <= cfg.eps) return out;
                }
                if (param_pos.empty()) break;
            }

            int pos = len - 1;
            while (pos >= 0 && ++sel[pos] == placements.size()) sel[pos--] = 0;
            if (pos < 0) break;
        }
    }
    return std::nullopt;
}

}  // namespace qcopt
