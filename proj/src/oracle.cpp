#include "nvsense/oracle.hpp"

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace nvsense {

namespace {

using Matrix = Eigen::MatrixXcd;
using std::complex;

constexpr complex<double> kI{0.0, 1.0};

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// exp(-i t (wz sz + wx sx) / 2) for one spin-1/2: rotation by angle
// t * sqrt(wz^2 + wx^2) about (wx, 0, wz).
Matrix spin_half_evolution(double wz, double wx, double t) {
    const double w = std::sqrt(wz * wz + wx * wx);
    const double half = 0.5 * w * t;
    const double c = std::cos(half);
    const double s = w > 0.0 ? std::sin(half) / w : 0.0;
    Matrix u(2, 2);
    u(0, 0) = c - kI * s * wz;
    u(0, 1) = -kI * s * wx;
    u(1, 0) = -kI * s * wx;
    u(1, 1) = c + kI * s * wz;
    return u;
}

Matrix probe_rotation(char axis, double angle, Eigen::Index nuclear_dim) {
    Matrix r(2, 2);
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    if (axis == 'x') {
        r << c, -kI * s, -kI * s, c;
    } else {
        r << c, -s, s, c;  // y axis
    }
    return kron(r, Matrix::Identity(nuclear_dim, nuclear_dim));
}

}  // namespace

double oracle_xy84_population(const NuclearSpinParams& params, const NuclearModelConfig& cfg,
                              double tau) {
    const int n_c = static_cast<int>(params.omega_h.size());
    if (n_c > 3) {
        throw std::invalid_argument("oracle_xy84_population: test-scale oracle, n_c <= 3 only");
    }
    if (params.theta.size() != params.omega_h.size()) {
        throw std::invalid_argument("oracle_xy84_population: parameter size mismatch");
    }
    const Eigen::Index nd = Eigen::Index{1} << n_c;

    // Conditional free evolution diag(U0, U1) on probe (x) nuclei. The
    // hyperfine Hamiltonians act with spin-1/2 operators, and different
    // nuclei commute, so each block is a Kronecker product of 2x2 rotations.
    const auto free_block = [&](double t) {
        Matrix u0 = Matrix::Identity(1, 1);
        Matrix u1 = Matrix::Identity(1, 1);
        for (int q = 0; q < n_c; ++q) {
            u0 = kron(u0, spin_half_evolution(cfg.omega_larmor, 0.0, t));
            const double wz = params.omega_h[q] * std::cos(params.theta[q]) + cfg.omega_larmor;
            const double wx = params.omega_h[q] * std::sin(params.theta[q]);
            u1 = kron(u1, spin_half_evolution(wz, wx, t));
        }
        Matrix u = Matrix::Zero(2 * nd, 2 * nd);
        u.topLeftCorner(nd, nd) = u0;
        u.bottomRightCorner(nd, nd) = u1;
        return u;
    };

    const Matrix f1 = free_block(tau);
    const Matrix f2 = free_block(2.0 * tau);
    static constexpr char kAxes[8] = {'x', 'y', 'x', 'y', 'y', 'x', 'y', 'x'};

    Matrix unit = f1;
    for (int p = 0; p < 8; ++p) {
        unit = probe_rotation(kAxes[p], units::kPi, nd) * unit;
        unit = (p < 7 ? f2 : f1) * unit;
    }
    Matrix train = unit * unit;  // 4 repetitions
    train = train * train;

    // rho = train * R_y(pi/2) |0><0| (x) I/nd * adjoint
    Matrix u = train * probe_rotation('y', 0.5 * units::kPi, nd);
    Matrix rho = Matrix::Zero(2 * nd, 2 * nd);
    rho.topLeftCorner(nd, nd) = Matrix::Identity(nd, nd) / static_cast<double>(nd);
    rho = u * rho * u.adjoint();

    const double decay = std::exp(-64.0 * tau / cfg.t2);
    rho.topRightCorner(nd, nd) *= decay;
    rho.bottomLeftCorner(nd, nd) *= decay;

    const Matrix w = probe_rotation('y', 1.5 * units::kPi, nd);
    rho = w * rho * w.adjoint();
    return rho.topLeftCorner(nd, nd).trace().real();
}

}  // namespace nvsense
