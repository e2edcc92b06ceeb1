#include "qcopt/unitary.hpp"

#include <cmath>
#include <complex>

#include "qcopt/errors.hpp"

namespace qcopt {

using std::complex;
using namespace std::complex_literals;

Eigen::MatrixXcd local_matrix(GateKind kind, double angle) {
    double c = std::cos(angle / 2), s = std::sin(angle / 2);
    switch (kind) {
        case GateKind::RX: {
            Eigen::Matrix2cd m;
            m << c, -1i * s, -1i * s, c;
            return m;
        }
        case GateKind::RY: {
            Eigen::Matrix2cd m;
            m << c, -s, s, c;
            return m;
        }
        case GateKind::RZ: {
            Eigen::Matrix2cd m;
            m << std::exp(-0.5i * angle), 0, 0, std::exp(0.5i * angle);
            return m;
        }
        case GateKind::RXX: {
            Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
            complex<double> d = c, a = -1i * s;
            m(0, 0) = d; m(1, 1) = d; m(2, 2) = d; m(3, 3) = d;
            m(0, 3) = a; m(1, 2) = a; m(2, 1) = a; m(3, 0) = a;
            return m;
        }
        case GateKind::CZ: {
            Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
            m(3, 3) = -1;
            return m;
        }
    }
    throw ConfigError("local_matrix: bad kind");
}

void apply_gate(Unitary& U, const Gate& g, int width) {
    const Eigen::Index dim = U.rows();
    if (g.arity() == 1) {
        Eigen::Matrix2cd m = local_matrix(g.kind, g.angle).topLeftCorner<2, 2>();
        const Eigen::Index bit = Eigen::Index{1} << g.q0;
        for (Eigen::Index col = 0; col < dim; ++col) {
            for (Eigen::Index r = 0; r < dim; ++r) {
                if (r & bit) continue;
                complex<double> x0 = U(r, col), x1 = U(r | bit, col);
                U(r, col) = m(0, 0) * x0 + m(0, 1) * x1;
                U(r | bit, col) = m(1, 0) * x0 + m(1, 1) * x1;
            }
        }
    } else {
        Eigen::Matrix4cd m = local_matrix(g.kind, g.angle).topLeftCorner<4, 4>();
        const Eigen::Index bhi = Eigen::Index{1} << g.q0;  // first operand = high local bit
        const Eigen::Index blo = Eigen::Index{1} << g.q1;
        for (Eigen::Index col = 0; col < dim; ++col) {
            for (Eigen::Index r = 0; r < dim; ++r) {
                if (r & (bhi | blo)) continue;
                Eigen::Index idx[4] = {r, r | blo, r | bhi, r | bhi | blo};
                complex<double> x[4] = {U(idx[0], col), U(idx[1], col), U(idx[2], col),
                                        U(idx[3], col)};
                for (int i = 0; i < 4; ++i)
                    U(idx[i], col) = m(i, 0) * x[0] + m(i, 1) * x[1] + m(i, 2) * x[2] +
                                     m(i, 3) * x[3];
            }
        }
    }
    (void)width;
}

static void check_cap(int width, int cap) {
    if (width > cap)
        throw ResourceError("dense unitary over " + std::to_string(width) +
                            " qubits exceeds cap " + std::to_string(cap));
    if (width < 0) throw ConfigError("negative width");
}

Unitary gate_unitary(const Gate& g, int width, int cap) {
    check_cap(width, cap);
    Eigen::Index dim = Eigen::Index{1} << width;
    Unitary U = Unitary::Identity(dim, dim);
    apply_gate(U, g, width);
    return U;
}

Unitary circuit_unitary(const Circuit& c, int cap) {
    check_cap(c.width, cap);
    Eigen::Index dim = Eigen::Index{1} << c.width;
    Unitary U = Unitary::Identity(dim, dim);
    for (const Gate& g : c.gates) apply_gate(U, g, c.width);
    return U;
}

PhaseMatch equal_up_to_phase(const Unitary& U, const Unitary& V, double tol) {
    if (U.rows() != V.rows() || U.cols() != V.cols())
        throw ConfigError("equal_up_to_phase: dimension mismatch");
    complex<double> tr = V.conjugate().cwiseProduct(U).sum();  // tr(V^dag U)
    double phase;
    if (std::abs(tr) > 1e-12) {
        phase = std::arg(tr);
    } else {
        // Trace-orthogonal but possibly still proportional in a corner case the
        // trace cannot see; align on V's largest entry instead.
        Eigen::Index r = 0, cidx = 0;
        V.cwiseAbs().maxCoeff(&r, &cidx);
        if (std::abs(V(r, cidx)) < 1e-300 || std::abs(U(r, cidx)) < 1e-300)
            return {false, 0.0};
        phase = std::arg(U(r, cidx) / V(r, cidx));
    }
    double dist = (U - std::exp(complex<double>(0, phase)) * V).norm();
    return {dist <= tol, phase};
}

PhaseMatch equal_up_to_phase(const Unitary& U, const Unitary& V) {
    return equal_up_to_phase(U, V, 1e-8 * static_cast<double>(U.rows()));
}

double hilbert_schmidt_distance(const Unitary& U, const Unitary& V) {
    if (U.rows() != V.rows()) throw ConfigError("hilbert_schmidt_distance: dimension mismatch");
    double d = static_cast<double>(U.rows());
    double t = std::abs(V.conjugate().cwiseProduct(U).sum()) / d;
    return std::sqrt(std::max(0.0, 1.0 - t * t));
}

CompactedBlock compact(const Circuit& sub) {
    if (sub.empty()) throw ConfigError("compact: empty sub-circuit");
    CompactedBlock b;
    for (const Gate& g : sub.gates) {
        b.active.push_back(g.q0);
        if (g.q1 >= 0) b.active.push_back(g.q1);
    }
    std::sort(b.active.begin(), b.active.end());
    b.active.erase(std::unique(b.active.begin(), b.active.end()), b.active.end());

    b.local.assign(sub.width, -1);
    for (size_t i = 0; i < b.active.size(); ++i) b.local[b.active[i]] = static_cast<int>(i);

    b.sub.width = static_cast<int>(b.active.size());
    b.sub.gates.reserve(sub.gates.size());
    for (Gate g : sub.gates) {
        g.q0 = b.local[g.q0];
        if (g.q1 >= 0) g.q1 = b.local[g.q1];
        b.sub.gates.push_back(g);
    }
    return b;
}

Circuit embed(const Circuit& sub, const std::vector<int>& wires, int width) {
    if (static_cast<int>(wires.size()) != sub.width)
        throw ConfigError("embed: wire map size != sub width");
    Circuit out;
    out.width = width;
    out.gates.reserve(sub.gates.size());
    for (Gate g : sub.gates) {
        g.q0 = wires[g.q0];
        if (g.q1 >= 0) g.q1 = wires[g.q1];
        out.gates.push_back(g);
    }
    out.validate();
    return out;
}

}  // namespace qcopt
