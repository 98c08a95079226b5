#pragma once

// Linear chain of N identical oscillators, each pinned with stiffness K and
// coupled to its neighbors with stiffness k.  In units where the pinning
// frequency is omega = sqrt(K/m), the quadratic form of the chain Hamiltonian
// is a symmetric tridiagonal coupling matrix A acting on the positions.
//
// Phase-space ordering is xi = (Q_1..Q_N, P_1..P_N) everywhere in this
// library.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace oscchain {

struct ChainParams {
    int n;          // number of oscillators, >= 1
    double epsilon; // coupling ratio k/K, >= 0
    double omega;   // pinning frequency sqrt(K/m), > 0

    ChainParams(int n_, double epsilon_, double omega_ = 1.0)
        : n(n_), epsilon(epsilon_), omega(omega_) {
        if (n < 1)
            throw std::invalid_argument("ChainParams: n must be >= 1, got " +
                                        std::to_string(n));
        if (!(epsilon >= 0.0))
            throw std::invalid_argument("ChainParams: epsilon must be >= 0");
        if (!(omega > 0.0))
            throw std::invalid_argument("ChainParams: omega must be > 0");
    }

    // Effective coupling epsilon/(1+2 epsilon); always in [0, 1/2).
    double gamma() const { return epsilon / (1.0 + 2.0 * epsilon); }

    // Renormalized frequency omega * sqrt(1+2 epsilon).
    double Omega() const { return omega * std::sqrt(1.0 + 2.0 * epsilon); }
};

// A_ij = (1+2 eps) delta_ij - eps (delta_i,j+1 + delta_i+1,j), N x N.
inline Eigen::MatrixXd build_coupling_matrix(const ChainParams& p) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p.n, p.n);
    for (int i = 0; i < p.n; ++i) {
        a(i, i) = 1.0 + 2.0 * p.epsilon;
        if (i + 1 < p.n) {
            a(i, i + 1) = -p.epsilon;
            a(i + 1, i) = -p.epsilon;
        }
    }
    return a;
}

// Closed-form eigensystem of the open chain.  sigma is symmetric and
// orthogonal (a discrete sine transform), and sigma * A * sigma^T = diag(lambda).
struct ModeSpectrum {
    Eigen::VectorXd phi;    // phi_l = l pi/(N+1), l = 1..N, ascending
    Eigen::VectorXd lambda; // lambda_l = 1 + 2 eps (1 - cos phi_l), in [1, 1+4 eps]
    Eigen::MatrixXd sigma;  // sigma(s-1,l-1) = sqrt(2/(N+1)) sin(s phi_l)
};

inline ModeSpectrum mode_spectrum(const ChainParams& p) {
    const int n = p.n;
    ModeSpectrum m;
    m.phi.resize(n);
    m.lambda.resize(n);
    m.sigma.resize(n, n);
    const double norm = std::sqrt(2.0 / (n + 1));
    for (int l = 0; l < n; ++l) {
        m.phi[l] = (l + 1) * M_PI / (n + 1);
        m.lambda[l] = 1.0 + 2.0 * p.epsilon * (1.0 - std::cos(m.phi[l]));
    }
    for (int s = 0; s < n; ++s)
        for (int l = 0; l < n; ++l)
            m.sigma(s, l) = norm * std::sin((s + 1) * m.phi[l]);
    return m;
}

// Antisymmetric form Gamma of the canonical commutators in the
// (Q_1..Q_n, P_1..P_n) ordering: [[0, I], [-I, 0]], 2n x 2n.
inline Eigen::MatrixXd commutation_matrix(int n) {
    if (n < 1)
        throw std::invalid_argument("commutation_matrix: n must be >= 1");
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    g.topRightCorner(n, n).setIdentity();
    g.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return g;
}

// Phase-space propagator of the chain at time t,
//   S(t) = [[ cos(w t A^1/2),        A^-1/2 sin(w t A^1/2) ],
//           [ -A^1/2 sin(w t A^1/2), cos(w t A^1/2)        ]],
// assembled spectrally from the mode basis.  Symplectic for every t.
struct Propagator {
    double time = 0.0;
    Eigen::MatrixXd matrix; // 2N x 2N

    int n() const { return static_cast<int>(matrix.rows()) / 2; }
    auto qq() const { return matrix.topLeftCorner(n(), n()); }
    auto qp() const { return matrix.topRightCorner(n(), n()); }
    auto pq() const { return matrix.bottomLeftCorner(n(), n()); }
    auto pp() const { return matrix.bottomRightCorner(n(), n()); }
};

inline Propagator propagator(const ChainParams& p, const ModeSpectrum& m, double t) {
    const int n = p.n;
    if (m.lambda.size() != n || m.sigma.rows() != n)
        throw std::invalid_argument("propagator: spectrum size does not match params");
    Eigen::VectorXd sq = m.lambda.cwiseSqrt();
    Eigen::ArrayXd th = p.omega * t * sq.array();
    Eigen::VectorXd c = th.cos().matrix();
    Eigen::VectorXd s = th.sin().matrix();

    Eigen::MatrixXd cosblk = m.sigma * c.asDiagonal() * m.sigma.transpose();
    Eigen::MatrixXd sinnorm =
        m.sigma * (s.array() / sq.array()).matrix().asDiagonal() * m.sigma.transpose();
    Eigen::MatrixXd sinscaled =
        m.sigma * (s.array() * sq.array()).matrix().asDiagonal() * m.sigma.transpose();

    Propagator out;
    out.time = t;
    out.matrix.resize(2 * n, 2 * n);
    out.matrix.topLeftCorner(n, n) = cosblk;
    out.matrix.topRightCorner(n, n) = sinnorm;
    out.matrix.bottomLeftCorner(n, n) = -sinscaled;
    out.matrix.bottomRightCorner(n, n) = cosblk;
    return out;
}

inline Propagator propagator(const ChainParams& p, double t) {
    return propagator(p, mode_spectrum(p), t);
}

// max |S Gamma S^T - Gamma|; zero iff S is exactly symplectic.
inline double verify_symplectic(const Eigen::MatrixXd& s) {
    if (s.rows() != s.cols() || s.rows() % 2 != 0 || s.rows() == 0)
        throw std::invalid_argument("verify_symplectic: matrix must be square with even dimension");
    const int n = static_cast<int>(s.rows()) / 2;
    Eigen::MatrixXd g = commutation_matrix(n);
    return ((s * g * s.transpose() - g).cwiseAbs()).maxCoeff();
}

} // namespace oscchain
