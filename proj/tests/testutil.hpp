#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "qcopt/unitary.hpp"

namespace testutil {

inline constexpr double kPi = 3.14159265358979323846;

// ---- independent rotation oracle -------------------------------------------
// exp(-i a G / 2) computed by eigendecomposition of the Hermitian generator G,
// a different evaluation path from the closed-form entries in the engine.

inline Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}
inline Eigen::Matrix2cd pauli_y() {
    Eigen::Matrix2cd m;
    m << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
    return m;
}
inline Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Eigen::MatrixXcd oracle_rotation(const Eigen::MatrixXcd& generator, double angle) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(generator);
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(std::complex<double>(0, -0.5 * angle * es.eigenvalues()(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// ---- statistics -------------------------------------------------------------

/// Wilson-Hilferty approximation to the chi-square quantile.
inline double chi_square_quantile(double df, double z) {
    double a = 2.0 / (9.0 * df);
    double t = 1.0 - a + z * std::sqrt(a);
    return df * t * t * t;
}

inline constexpr double kZ99 = 2.3263478740408408;   // standard normal 0.99 quantile
inline constexpr double kZ999 = 3.0902323061678132;  // 0.999

inline double chi_square_stat(const std::vector<double>& observed,
                              const std::vector<double>& expected) {
    double s = 0;
    for (size_t i = 0; i < observed.size(); ++i) {
        double d = observed[i] - expected[i];
        s += d * d / expected[i];
    }
    return s;
}

/// Two-sample chi-square homogeneity statistic over aligned count vectors.
/// Returns (stat, df).
inline std::pair<double, double> two_sample_chi_square(const std::vector<double>& a,
                                                       const std::vector<double>& b) {
    double na = 0, nb = 0;
    for (double v : a) na += v;
    for (double v : b) nb += v;
    double stat = 0;
    int used = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double tot = a[i] + b[i];
        if (tot <= 0) continue;
        ++used;
        double ea = tot * na / (na + nb);
        double eb = tot * nb / (na + nb);
        stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    }
    return {stat, static_cast<double>(used - 1)};
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// One-sided Wilcoxon signed-rank p-value for the hypothesis median(a-b) < 0,
/// normal approximation with tie correction. Zero differences are dropped.
inline double wilcoxon_signed_rank_less(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    std::vector<double> diffs;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) diffs.push_back(a[i] - b[i]);
    size_t n = diffs.size();
    if (n == 0) return 1.0;

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
        return std::abs(diffs[x]) < std::abs(diffs[y]);
    });

    std::vector<double> rank(n);
    double tie_term = 0;
    for (size_t i = 0; i < n;) {
        size_t j = i;
        while (j < n && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (size_t k = i; k < j; ++k) rank[order[k]] = avg;
        double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }

    double w_plus = 0;
    for (size_t i = 0; i < n; ++i)
        if (diffs[i] > 0) w_plus += rank[i];

    double nn = static_cast<double>(n);
    double mean = nn * (nn + 1) / 4.0;
    double var = nn * (nn + 1) * (2 * nn + 1) / 24.0 - tie_term / 48.0;
    if (var <= 0) return w_plus < mean ? 0.0 : 1.0;
    double z = (w_plus - mean + 0.5) / std::sqrt(var);  // continuity-corrected
    return normal_cdf(z);                               // small W+ (a below b) -> small p
}

/// Rank-based AUC: probability a positive scores above a random negative,
/// ties counted half.
inline double ranking_auc(const std::vector<double>& positives,
                          const std::vector<double>& negatives) {
    if (positives.empty() || negatives.empty()) return 0.5;
    double wins = 0;
    for (double p : positives)
        for (double q : negatives) wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
    return wins / (static_cast<double>(positives.size()) * static_cast<double>(negatives.size()));
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- filesystem -------------------------------------------------------------

/// Self-deleting scratch directory under the system temp root.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path = std::filesystem::temp_directory_path() /
               ("qcopt_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace testutil
