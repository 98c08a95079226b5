#pragma once

#include <oscchain/continuum.hpp>
#include <oscchain/gaussian.hpp>

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oscchain {

// Inverse temperature of the thermal state matching one relaxed mode, in
// units of 1/(hbar omega).  Even in eta; eta = 0 maps to +infinity (ground
// state).  Two algebraically equal forms of 2 arccoth(cosh eta) keep full
// precision at both ends: tanh saturates to 1 for large arguments, so the
// log form dies above |eta| ~ 37 while the atanh form loses digits below
// |eta| ~ 0.01.
inline double effective_beta(double eta) {
    if (std::isnan(eta)) throw std::invalid_argument("effective_beta: eta must not be NaN");
    const double a = std::abs(eta);
    if (a <= 1.0) return -2.0 * std::log(std::tanh(0.5 * a));
    return 4.0 * std::atanh(std::exp(-a));
}

// Inverse of effective_beta on beta > 0: eta = -ln tanh(beta/4), accurate
// down to eta ~ 1e-16; beta = +inf maps to eta = 0 exactly.
inline double eta_from_beta(double beta) {
    if (std::isnan(beta) || beta <= 0.0) throw std::invalid_argument("eta_from_beta: beta must be positive");
    return -std::log(std::tanh(0.25 * beta));
}

// Thermal mean occupation of one relaxed mode, (cosh eta - 1)/2.
inline double mean_occupation(double eta) {
    const double s = std::sinh(0.5 * eta);
    return s * s;
}

// Single-mode thermal covariance, (coth(beta/2)/2) I_2.
inline CovarianceMatrix boltzmann_covariance(double beta) {
    if (std::isnan(beta) || beta <= 0.0) throw std::invalid_argument("boltzmann_covariance: beta must be positive");
    return (0.5 / std::tanh(0.5 * beta)) * CovarianceMatrix::Identity(2, 2);
}

struct SimonResult {
    double value = 0.0;
    bool entangled = false;
};

// Separability scalar for the two-site relaxed state; a negative value
// certifies entanglement between neighbouring oscillators.
inline SimonResult simon_criterion(double eta, double gamma) {
    if (std::isnan(eta)) throw std::invalid_argument("simon_criterion: eta must not be NaN");
    if (!(gamma >= 0.0 && gamma < 0.5)) throw std::invalid_argument("simon_criterion: gamma must lie in [0, 1/2)");
    const double ch2 = std::cosh(eta) * std::cosh(eta);
    const double g2 = 0.25 * gamma * gamma;
    const double value =
        (ch2 - std::exp(-2.0 * eta) * g2) * (ch2 - std::exp(2.0 * eta) * g2) - std::cosh(2.0 * eta);
    return {value, value < 0.0};
}

// Simon's PPT scalar for an arbitrary two-mode covariance in the native
// (Q1, Q2, P1, P2) ordering.  For a physical state it is negative exactly
// when the partial transpose violates the uncertainty relation, which for
// Gaussian states is equivalent to entanglement.
inline double simon_determinant_form(const Eigen::Matrix4d& v) {
    Eigen::Matrix2d a, b, c, j;
    a << v(0, 0), v(0, 2), v(2, 0), v(2, 2);
    b << v(1, 1), v(1, 3), v(3, 1), v(3, 3);
    c << v(0, 1), v(0, 3), v(2, 1), v(2, 3);
    j << 0.0, 1.0, -1.0, 0.0;
    const double da = a.determinant();
    const double db = b.determinant();
    const double dc = c.determinant();
    const double cross = (a * j * c * j * b * j * c.transpose() * j).trace();
    return da * db + (0.25 - std::abs(dc)) * (0.25 - std::abs(dc)) - cross - 0.25 * (da + db);
}

// Purity nu = [4 sqrt(det V)]^{-1} of the two-site relaxed state.  The
// O(gamma) stationary matrix can push this slightly above 1 near eta = 0;
// the value is reported as computed, not clamped.
inline double two_mode_purity(double eta, double gamma) {
    if (std::isnan(eta)) throw std::invalid_argument("two_mode_purity: eta must not be NaN");
    if (!(gamma >= 0.0 && gamma < 0.5)) throw std::invalid_argument("two_mode_purity: gamma must lie in [0, 1/2)");
    const double ch2 = std::cosh(eta) * std::cosh(eta);
    const double g2 = 0.25 * gamma * gamma;
    const double det16 = (ch2 - std::exp(-2.0 * eta) * g2) * (ch2 - std::exp(2.0 * eta) * g2);
    return 1.0 / std::sqrt(det16);
}

// Squeezing threshold below which the two-site relaxed state is entangled:
// the root of the separability scalar in eta, or 0 when no entangled
// window exists.  The scalar is strictly increasing in eta on [0, 5].
inline double simon_boundary_eta(double gamma, double tol = 1e-10) {
    if (!(tol > 0.0)) throw std::invalid_argument("simon_boundary_eta: tol must be positive");
    double lo = 0.0;
    double hi = 5.0;
    if (simon_criterion(lo, gamma).value >= 0.0) return 0.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (simon_criterion(mid, gamma).value < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Max-abs elementwise distance of each covariance snapshot from a target.
inline std::vector<std::pair<double, double>> equilibration_distance(
    const std::vector<std::pair<double, CovarianceMatrix>>& series, const CovarianceMatrix& target) {
    std::vector<std::pair<double, double>> out;
    out.reserve(series.size());
    for (const auto& [t, v] : series) {
        if (v.rows() != target.rows() || v.cols() != target.cols())
            throw std::invalid_argument("equilibration_distance: snapshot dimension does not match target");
        out.emplace_back(t, (v - target).cwiseAbs().maxCoeff());
    }
    return out;
}

// Flat per-point record consumed by the sweep output.
struct EquilibriumReport {
    double eta = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
    double n_bar = 0.0;
    double nu1 = 0.0;
    double nu2 = 0.0;
    double entropy1 = 0.0;
    double simon_value = 0.0;
    double simon_general = 0.0;
    bool entangled = false;
};

// Full diagnostic record for one (eta, gamma) point.  The scalar criterion
// decides `entangled`; the generic PPT value is carried alongside, and a
// one-time warning flags the thin boundary band where the two disagree by
// their O(gamma^2) offset.
inline EquilibriumReport equilibrium_report(double eta, double gamma) {
    EquilibriumReport r;
    r.eta = eta;
    r.gamma = gamma;
    r.beta = effective_beta(eta);
    r.n_bar = mean_occupation(eta);
    r.nu1 = 1.0 / std::cosh(eta);
    r.nu2 = two_mode_purity(eta, gamma);
    r.entropy1 = entropy_from_purity(r.nu1);
    const SimonResult s = simon_criterion(eta, gamma);
    r.simon_value = s.value;
    r.entangled = s.entangled;
    r.simon_general = simon_determinant_form(steady_state_covariance(2, eta, gamma));
    if ((r.simon_general < 0.0) != s.entangled) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true)) {
            std::cerr << "oscchain: separability tests disagree near the boundary (eta=" << eta << ", gamma=" << gamma
                      << ", scalar=" << r.simon_value << ", ppt=" << r.simon_general << ")\n";
        }
    }
    return r;
}

} // namespace oscchain
