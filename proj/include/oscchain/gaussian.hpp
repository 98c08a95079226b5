#pragma once

// Gaussian states of the chain, represented entirely by their covariance
// matrix V_ab = 1/2 <{dxi_a, dxi_b}> in the (Q_1..Q_N, P_1..P_N) ordering.
// First moments are zero for every state handled here, so V is the whole
// story: preparation, exact evolution V -> S V S^T, partial trace (principal
// submatrix), and the spectral diagnostics nu, S, symplectic eigenvalues.

#include <oscchain/chain.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscchain {

using CovarianceMatrix = Eigen::MatrixXd;

// Squeezed product preparation: momentum-squeezed bath sites (parameter eta)
// and a handful of distinguished sites squeezed with parameter mu instead.
struct PrepSpec {
    double eta = 0.0;
    double mu = 0.0;
    std::vector<int> system_sites; // 1-based, strictly increasing

    void validate(int n) const {
        if (static_cast<int>(system_sites.size()) > n)
            throw std::invalid_argument("PrepSpec: more system sites than chain sites");
        int prev = 0;
        for (int r : system_sites) {
            if (r < 1 || r > n)
                throw std::invalid_argument("PrepSpec: site index " + std::to_string(r) +
                                            " out of range 1.." + std::to_string(n));
            if (r <= prev)
                throw std::invalid_argument("PrepSpec: system_sites must be strictly increasing");
            prev = r;
        }
    }
};

// V(0) = 1/2 (D_Q + D_P direct sum), D_Q diagonal with e^{-eta} on bath
// sites and e^{-mu} on system sites, D_P = D_Q^{-1}.  Pure by construction.
inline CovarianceMatrix initial_covariance(const ChainParams& params, const PrepSpec& prep) {
    prep.validate(params.n);
    const int n = params.n;
    Eigen::VectorXd dq = Eigen::VectorXd::Constant(n, std::exp(-prep.eta));
    Eigen::VectorXd dp = Eigen::VectorXd::Constant(n, std::exp(prep.eta));
    for (int r : prep.system_sites) {
        dq[r - 1] = std::exp(-prep.mu);
        dp[r - 1] = std::exp(prep.mu);
    }
    CovarianceMatrix v = CovarianceMatrix::Zero(2 * n, 2 * n);
    v.diagonal().head(n) = 0.5 * dq;
    v.diagonal().tail(n) = 0.5 * dp;
    return v;
}

// One system site's deviation from the homogeneous bath preparation: two
// diagonal entries, dq at (site, site) and dp at (N+site, N+site).
struct SiteCorrection {
    int site = 0; // 1-based
    double dq = 0.0;
    double dp = 0.0;
};

struct SplitCovariance {
    CovarianceMatrix bath; // 1/2 (e^{-eta} I + e^{eta} I direct sum)
    std::vector<SiteCorrection> corrections;

    CovarianceMatrix reconstruct() const {
        CovarianceMatrix v = bath;
        const int n = static_cast<int>(v.rows()) / 2;
        for (const auto& c : corrections) {
            v(c.site - 1, c.site - 1) += c.dq;
            v(n + c.site - 1, n + c.site - 1) += c.dp;
        }
        return v;
    }
};

// Split V(0) into the translation-invariant bath part plus one rank-2
// diagonal correction per system site,
//   dq = 1/2 (e^{-mu} - e^{-eta}),   dp = 1/2 (e^{mu} - e^{eta}),
// so that bath + sum of corrections reproduces V(0) exactly.
inline SplitCovariance split_covariance(const CovarianceMatrix& v0, const ChainParams& params,
                                        const PrepSpec& prep) {
    prep.validate(params.n);
    if (v0.rows() != 2 * params.n || v0.cols() != 2 * params.n)
        throw std::invalid_argument("split_covariance: dimension mismatch");
    if (((v0 - initial_covariance(params, prep)).cwiseAbs()).maxCoeff() != 0.0)
        throw std::invalid_argument("split_covariance: V0 does not match the preparation");

    const int n = params.n;
    SplitCovariance out;
    out.bath = CovarianceMatrix::Zero(2 * n, 2 * n);
    out.bath.diagonal().head(n).setConstant(0.5 * std::exp(-prep.eta));
    out.bath.diagonal().tail(n).setConstant(0.5 * std::exp(prep.eta));
    out.corrections.reserve(prep.system_sites.size());
    for (int r : prep.system_sites)
        out.corrections.push_back(
            {r, 0.5 * (std::exp(-prep.mu) - std::exp(-prep.eta)),
             0.5 * (std::exp(prep.mu) - std::exp(prep.eta))});
    return out;
}

// Exact covariance update under the linear dynamics: V(t) = S V(0) S^T.
inline CovarianceMatrix evolve(const CovarianceMatrix& v0, const Propagator& s) {
    if (v0.rows() != s.matrix.rows() || v0.cols() != s.matrix.cols())
        throw std::invalid_argument("evolve: dimension mismatch");
    CovarianceMatrix w = s.matrix * v0 * s.matrix.transpose();
    return 0.5 * (w + w.transpose());
}

// Principal submatrix over the retained sites' Q and P rows/columns; this is
// the covariance of the partial trace.  Sites are 1-based and kept in the
// given order, so the output ordering is (Q_{r1}..Q_{rk}, P_{r1}..P_{rk}).
inline CovarianceMatrix reduce_covariance(const CovarianceMatrix& v, const std::vector<int>& sites) {
    if (v.rows() != v.cols() || v.rows() % 2 != 0 || v.rows() == 0)
        throw std::invalid_argument("reduce_covariance: square even-dimensioned matrix required");
    if (sites.empty())
        throw std::invalid_argument("reduce_covariance: empty site list");
    const int n = static_cast<int>(v.rows()) / 2;
    std::vector<int> seen(static_cast<size_t>(n), 0);
    for (int r : sites) {
        if (r < 1 || r > n)
            throw std::invalid_argument("reduce_covariance: site index " + std::to_string(r) +
                                        " out of range 1.." + std::to_string(n));
        if (seen[static_cast<size_t>(r - 1)]++)
            throw std::invalid_argument("reduce_covariance: duplicate site index " + std::to_string(r));
    }
    const int k = static_cast<int>(sites.size());
    CovarianceMatrix sub(2 * k, 2 * k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            int ra = sites[static_cast<size_t>(a)] - 1, rb = sites[static_cast<size_t>(b)] - 1;
            sub(a, b) = v(ra, rb);
            sub(a, k + b) = v(ra, n + rb);
            sub(k + a, b) = v(n + ra, rb);
            sub(k + a, k + b) = v(n + ra, n + rb);
        }
    return sub;
}

// Moduli d_k of the eigenvalues of i Gamma V, one per mode, ascending.
// The spectrum of Gamma V comes in pairs +- i d_k; the pairing (and how
// close the spurious real parts are to zero) is checked against pair_tol.
inline Eigen::VectorXd symplectic_eigenvalues(const CovarianceMatrix& v, double pair_tol = 1e-9) {
    if (v.rows() != v.cols() || v.rows() % 2 != 0 || v.rows() == 0)
        throw std::invalid_argument("symplectic_eigenvalues: square even-dimensioned matrix required");
    const int n = static_cast<int>(v.rows()) / 2;
    if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, v.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("symplectic_eigenvalues: matrix is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(v);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("symplectic_eigenvalues: matrix is not positive definite");

    Eigen::EigenSolver<Eigen::MatrixXd> es(commutation_matrix(n) * v, /*computeEigenvectors=*/false);
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    std::vector<double> pos, neg;
    for (int i = 0; i < 2 * n; ++i) {
        auto z = es.eigenvalues()[i];
        if (std::abs(z.real()) > pair_tol * scale)
            throw std::runtime_error("symplectic_eigenvalues: eigenvalue has non-negligible real part");
        (z.imag() >= 0.0 ? pos : neg).push_back(std::abs(z.imag()));
    }
    if (pos.size() != static_cast<size_t>(n) || neg.size() != static_cast<size_t>(n))
        throw std::runtime_error("symplectic_eigenvalues: spectrum does not split into +-i pairs");
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) {
        if (std::abs(pos[static_cast<size_t>(i)] - neg[static_cast<size_t>(i)]) > pair_tol * scale)
            throw std::runtime_error("symplectic_eigenvalues: +-i pairing failed");
        d[i] = 0.5 * (pos[static_cast<size_t>(i)] + neg[static_cast<size_t>(i)]);
    }
    return d;
}

// nu = [2^n sqrt(det V)]^{-1}, evaluated through the Cholesky log-determinant
// so large n does not overflow the determinant.
inline double purity(const CovarianceMatrix& v) {
    if (v.rows() != v.cols() || v.rows() % 2 != 0 || v.rows() == 0)
        throw std::invalid_argument("purity: square even-dimensioned matrix required");
    const int n = static_cast<int>(v.rows()) / 2;
    Eigen::LLT<Eigen::MatrixXd> llt(v);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("purity: matrix is not positive definite");
    double logdet = 0.0;
    for (int i = 0; i < 2 * n; ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return std::exp(-n * std::log(2.0) - 0.5 * logdet);
}

// Thermal entropy as a function of mean occupation: (n+1)ln(n+1) - n ln n.
inline double entropy_from_occupation(double n_bar) {
    if (n_bar < 0.0)
        throw std::invalid_argument("entropy_from_occupation: negative occupation");
    if (n_bar == 0.0)
        return 0.0;
    return (n_bar + 1.0) * std::log(n_bar + 1.0) - n_bar * std::log(n_bar);
}

// Single-mode von Neumann entropy as a function of the purity nu,
//   S(nu) = ((1-nu)/(2 nu)) ln((1+nu)/(1-nu)) - ln(2 nu/(1+nu)).
// Equivalent to entropy_from_occupation with n_bar = (1-nu)/(2 nu).  The
// direct form loses all digits as nu -> 1 (ln(1-nu) cancellation), so above
// nu = 1 - 1e-6 a series in n_bar is used instead.
inline double entropy_from_purity(double nu) {
    if (!(nu > 0.0))
        throw std::invalid_argument("entropy_from_purity: purity must be positive");
    if (nu > 1.0 + 1e-12)
        throw std::invalid_argument("entropy_from_purity: purity exceeds 1 (unphysical)");
    double n_bar = (1.0 - nu) / (2.0 * nu);
    if (n_bar <= 0.0)
        return 0.0;
    if (nu > 1.0 - 1e-6)
        return n_bar * (1.0 - std::log(n_bar)) + 0.5 * n_bar * n_bar -
               n_bar * n_bar * n_bar / 6.0;
    return ((1.0 - nu) / (2.0 * nu)) * std::log((1.0 + nu) / (1.0 - nu)) -
           std::log(2.0 * nu / (1.0 + nu));
}

// A reduced state with its spectral diagnostics.
struct SubsystemState {
    std::vector<int> sites;
    CovarianceMatrix v_sub;
    Eigen::VectorXd symplectic_eigs;
    double nu = 1.0;
    double entropy = 0.0;
};

// Total entropy of a (generally mixed) Gaussian state: the single-mode
// function summed over modes with per-mode purity nu_k = 1/(2 d_k).  The
// modewise sum is the standard multi-mode extension; only n = 1 has a
// closed-form counterpart elsewhere in this library.
inline double von_neumann_entropy(const SubsystemState& state) {
    double s = 0.0;
    for (int i = 0; i < state.symplectic_eigs.size(); ++i)
        s += entropy_from_purity(std::min(1.0, 1.0 / (2.0 * state.symplectic_eigs[i])));
    return s;
}

inline SubsystemState reduce_subsystem(const CovarianceMatrix& v, const std::vector<int>& sites,
                                       double pair_tol = 1e-9) {
    SubsystemState st;
    st.sites = sites;
    st.v_sub = reduce_covariance(v, sites);
    st.symplectic_eigs = symplectic_eigenvalues(st.v_sub, pair_tol);
    st.nu = purity(st.v_sub);
    st.entropy = von_neumann_entropy(st);
    return st;
}

// Uncertainty-principle check: symmetric and every symplectic eigenvalue
// >= 1/2 - tol.
inline bool is_physical(const CovarianceMatrix& v, double tol = 1e-9) {
    if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff()))
        return false;
    try {
        return symplectic_eigenvalues(v).minCoeff() >= 0.5 - tol;
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace oscchain
