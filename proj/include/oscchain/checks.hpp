#pragma once

#include <oscchain/chain.hpp>
#include <oscchain/diagnostics.hpp>
#include <oscchain/gaussian.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace oscchain {

struct CheckResult {
    std::string name;
    bool passed = false;
    double metric = 0.0; // worst residual observed
    std::string detail;
};

namespace detail {

inline CheckResult make_result(const std::string& name, double metric, double bound) {
    CheckResult r;
    r.name = name;
    r.metric = metric;
    r.passed = metric < bound;
    std::ostringstream os;
    os << "max residual " << metric << " (bound " << bound << ")";
    r.detail = os.str();
    return r;
}

} // namespace detail

// Symplectic condition, group law and inverse law for random propagators.
inline CheckResult check_symplectic_random(int trials = 200, unsigned int seed = 20260814) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> pick_n(1, 64);
    std::uniform_real_distribution<double> pick_eps(0.0, 5.0);
    std::uniform_real_distribution<double> pick_t(-10.0, 10.0);
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
        const ChainParams params(pick_n(rng), pick_eps(rng));
        const ModeSpectrum spectrum = mode_spectrum(params);
        const double t1 = pick_t(rng), t2 = pick_t(rng);
        const Propagator s1 = propagator(params, spectrum, t1);
        const Propagator s2 = propagator(params, spectrum, t2);
        const Propagator s12 = propagator(params, spectrum, t1 + t2);
        const Propagator inv = propagator(params, spectrum, -t1);
        worst = std::max(worst, verify_symplectic(s1.matrix));
        worst = std::max(worst, (s1.matrix * s2.matrix - s12.matrix).cwiseAbs().maxCoeff());
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(s1.matrix.rows(), s1.matrix.cols());
        worst = std::max(worst, (s1.matrix * inv.matrix - eye).cwiseAbs().maxCoeff());
    }
    return detail::make_result("symplectic_random", worst, 1e-9);
}

// The evolved full state stays pure: nu = 1 along the whole trajectory.
inline CheckResult check_global_purity(int steps = 100) {
    const ChainParams params(64, 0.7);
    const PrepSpec prep{0.6, -0.4, {20, 45}};
    const CovarianceMatrix v0 = initial_covariance(params, prep);
    const ModeSpectrum spectrum = mode_spectrum(params);
    double worst = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double t = 40.0 * (k + 1) / steps;
        const CovarianceMatrix v = evolve(v0, propagator(params, spectrum, t));
        worst = std::max(worst, std::abs(purity(v) - 1.0));
    }
    return detail::make_result("global_purity", worst, 1e-7);
}

// The relaxed single mode is the thermal state at beta(eta), and the
// beta-eta map round trips.
inline CheckResult check_thermal_identification() {
    double worst_diff = 0.0;
    double worst_rt = 0.0;
    for (double eta : {0.1, 0.5, 1.0, 2.0}) {
        const double beta = effective_beta(eta);
        for (double gamma : {0.0, 0.1, 0.3}) {
            const CovarianceMatrix diff = steady_state_covariance(1, eta, gamma) - boltzmann_covariance(beta);
            worst_diff = std::max(worst_diff, diff.cwiseAbs().maxCoeff());
        }
        worst_rt = std::max(worst_rt, std::abs(std::cosh(eta) - 1.0 / std::tanh(0.5 * beta)));
    }
    CheckResult r = detail::make_result("thermal_identification", worst_diff, 1e-14);
    r.passed = r.passed && worst_rt < 1e-12;
    std::ostringstream os;
    os << r.detail << ", round trip " << worst_rt << " (bound 1e-12)";
    r.detail = os.str();
    return r;
}

// Both entropy formulas give S(nu = 1/3) = 2 ln 2 and agree on a grid.
inline CheckResult check_entropy_formulas() {
    double worst = 0.0;
    const double target = 2.0 * std::log(2.0);
    worst = std::max(worst, std::abs(entropy_from_purity(1.0 / 3.0) - target));
    worst = std::max(worst, std::abs(entropy_from_occupation(1.0) - target));
    for (int k = 1; k <= 40; ++k) {
        const double nu = k / 41.0;
        const double n_bar = (1.0 - nu) / (2.0 * nu);
        worst = std::max(worst, std::abs(entropy_from_purity(nu) - entropy_from_occupation(n_bar)));
    }
    return detail::make_result("entropy_formulas", worst, 1e-12);
}

inline std::vector<CheckResult> run_all_checks() {
    return {check_symplectic_random(), check_global_purity(), check_thermal_identification(),
            check_entropy_formulas()};
}

} // namespace oscchain
