#include <oscchain/diagnostics.hpp>

#include <oscchain/chain.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace oscchain;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("effective inverse temperature", "[diagnostics]") {
    SECTION("cosh eta = 2 gives beta = ln 3") {
        CHECK_THAT(effective_beta(std::acosh(2.0)), WithinAbs(1.0986122886681098, 1e-14));
    }
    SECTION("eta = 0 is the ground state") {
        CHECK(std::isinf(effective_beta(0.0)));
        CHECK(effective_beta(0.0) > 0.0);
    }
    SECTION("even and strictly decreasing in |eta|") {
        CHECK(effective_beta(-0.7) == effective_beta(0.7));
        CHECK(effective_beta(0.3) > effective_beta(0.8));
        CHECK(effective_beta(0.8) > effective_beta(2.1));
    }
    SECTION("high-temperature limit") {
        const double b = effective_beta(50.0);
        CHECK(b > 0.0);
        CHECK(b < 1e-20);
    }
    SECTION("rejects NaN") {
        CHECK_THROWS_AS(effective_beta(std::nan("")), std::invalid_argument);
    }
}

TEST_CASE("beta-eta round trip", "[diagnostics]") {
    SECTION("eta -> beta -> eta to 1e-12") {
        for (double eta : {0.01, 0.03, 0.1, 0.5, 1.0, 2.0, 3.7, 5.0}) {
            CHECK_THAT(eta_from_beta(effective_beta(eta)), WithinAbs(eta, 1e-12));
        }
    }
    SECTION("beta -> eta satisfies cosh eta = coth(beta/2)") {
        for (double beta : {0.1, 0.7, 1.0986122886681098, 3.0, 10.0}) {
            const double eta = eta_from_beta(beta);
            CHECK_THAT(std::cosh(eta), WithinRel(1.0 / std::tanh(0.5 * beta), 1e-12));
        }
    }
    SECTION("rejects nonpositive beta") {
        CHECK_THROWS_AS(eta_from_beta(0.0), std::invalid_argument);
        CHECK_THROWS_AS(eta_from_beta(-1.0), std::invalid_argument);
        CHECK_THROWS_AS(eta_from_beta(std::nan("")), std::invalid_argument);
    }
}

TEST_CASE("mean occupation", "[diagnostics]") {
    CHECK(mean_occupation(0.0) == 0.0);
    CHECK_THAT(mean_occupation(1.0), WithinAbs(0.5 * (std::cosh(1.0) - 1.0), 1e-15));
    // occupation and purity describe the same thermal state
    for (double eta : {0.2, 0.9, 2.5}) {
        CHECK_THAT(entropy_from_occupation(mean_occupation(eta)),
                   WithinRel(entropy_from_purity(1.0 / std::cosh(eta)), 1e-12));
    }
}

TEST_CASE("boltzmann covariance", "[diagnostics]") {
    SECTION("beta = ln 3 gives unit variances") {
        auto v = boltzmann_covariance(std::log(3.0));
        CHECK_THAT(v(0, 0), WithinAbs(1.0, 1e-15));
        CHECK_THAT(v(1, 1), WithinAbs(1.0, 1e-15));
        CHECK(v(0, 1) == 0.0);
        CHECK(v(1, 0) == 0.0);
    }
    SECTION("zero-temperature limit is the vacuum") {
        auto v = boltzmann_covariance(std::numeric_limits<double>::infinity());
        CHECK(v(0, 0) == 0.5);
        CHECK(v(1, 1) == 0.5);
        CHECK((boltzmann_covariance(40.0) - 0.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    }
    SECTION("rejects nonpositive beta") {
        CHECK_THROWS_AS(boltzmann_covariance(0.0), std::invalid_argument);
        CHECK_THROWS_AS(boltzmann_covariance(-2.0), std::invalid_argument);
    }
}

TEST_CASE("relaxed single mode is exactly thermal", "[diagnostics]") {
    for (double eta : {0.1, 0.5, 1.0, 2.0}) {
        for (double gamma : {0.0, 0.1, 0.3}) {
            const CovarianceMatrix diff =
                steady_state_covariance(1, eta, gamma) - boltzmann_covariance(effective_beta(eta));
            CHECK(diff.cwiseAbs().maxCoeff() < 1e-14);
        }
    }
}

TEST_CASE("separability scalar", "[diagnostics]") {
    SECTION("frozen entangled point") {
        auto r = simon_criterion(0.0, 0.1);
        CHECK_THAT(r.value, WithinAbs(-0.00499375, 1e-15));
        CHECK(r.entangled);
    }
    SECTION("uncoupled modes are separable") {
        for (double eta : {0.0, 0.3, 1.0, 2.4}) {
            auto r = simon_criterion(eta, 0.0);
            const double ch2 = std::cosh(eta) * std::cosh(eta);
            CHECK_THAT(r.value, WithinAbs((ch2 - 1.0) * (ch2 - 1.0), 1e-12 * std::max(1.0, ch2 * ch2)));
            CHECK_FALSE(r.entangled);
        }
    }
    SECTION("entangled window closes as eta grows") {
        CHECK(simon_criterion(0.01, 0.05).entangled);
        CHECK_FALSE(simon_criterion(1.0, 0.05).entangled);
    }
    SECTION("argument validation") {
        CHECK_THROWS_AS(simon_criterion(0.5, -0.01), std::invalid_argument);
        CHECK_THROWS_AS(simon_criterion(0.5, 0.5), std::invalid_argument);
    }
}

TEST_CASE("entanglement boundary", "[diagnostics]") {
    SECTION("root of the scalar, increasing in gamma") {
        double prev = 0.0;
        for (double gamma : {0.01, 0.05, 0.1}) {
            const double star = simon_boundary_eta(gamma);
            CHECK(std::abs(simon_criterion(star, gamma).value) < 1e-8);
            CHECK(simon_criterion(star - 1e-4, gamma).entangled);
            CHECK_FALSE(simon_criterion(star + 1e-4, gamma).entangled);
            // leading-order location (gamma^2/2)^(1/4)
            CHECK_THAT(star, WithinRel(std::pow(0.5 * gamma * gamma, 0.25), 0.05));
            CHECK(star > prev);
            prev = star;
        }
    }
    SECTION("no window without coupling") {
        CHECK(simon_boundary_eta(0.0) == 0.0);
    }
}

namespace {

Eigen::Matrix4d local_squeeze(double r1, double r2) {
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    s(0, 0) = std::exp(r1);
    s(1, 1) = std::exp(r2);
    s(2, 2) = std::exp(-r1);
    s(3, 3) = std::exp(-r2);
    return s;
}

Eigen::Matrix4d phase_rotation(int mode, double theta) {
    Eigen::Matrix4d s = Eigen::Matrix4d::Identity();
    const int q = mode, p = mode + 2;
    s(q, q) = std::cos(theta);
    s(q, p) = std::sin(theta);
    s(p, q) = -std::sin(theta);
    s(p, p) = std::cos(theta);
    return s;
}

Eigen::Matrix4d beam_splitter(double phi) {
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    Eigen::Matrix2d r;
    r << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
    s.block<2, 2>(0, 0) = r;
    s.block<2, 2>(2, 2) = r;
    return s;
}

}  // namespace

TEST_CASE("generic two-mode PPT scalar", "[diagnostics]") {
    SECTION("vacuum sits on the boundary") {
        CHECK(simon_determinant_form(0.5 * Eigen::Matrix4d::Identity()) == 0.0);
    }
    SECTION("two-mode squeezed state") {
        // V = S_TMS/2 has scalar -sinh^2(2r)/4
        for (double r : {0.1, 0.4, 0.9}) {
            const double c = std::cosh(2.0 * r), s = std::sinh(2.0 * r);
            Eigen::Matrix4d v = Eigen::Matrix4d::Zero();
            v(0, 0) = v(1, 1) = v(2, 2) = v(3, 3) = 0.5 * c;
            v(0, 1) = v(1, 0) = 0.5 * s;
            v(2, 3) = v(3, 2) = -0.5 * s;
            CHECK_THAT(simon_determinant_form(v), WithinAbs(-0.25 * s * s, 1e-13 * std::max(1.0, s * s)));
        }
    }
    SECTION("agrees with a partial-transpose oracle on random states") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> squeeze(-0.8, 0.8);
        std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
        std::uniform_real_distribution<double> temp(1.0, 1.6);
        const Eigen::Vector4d flip(1.0, 1.0, 1.0, -1.0);
        int kept = 0, entangled_seen = 0, separable_seen = 0;
        for (int trial = 0; trial < 200; ++trial) {
            Eigen::Matrix4d s = local_squeeze(squeeze(rng), squeeze(rng)) * phase_rotation(0, angle(rng)) *
                                beam_splitter(angle(rng)) * local_squeeze(squeeze(rng), squeeze(rng)) *
                                phase_rotation(1, angle(rng)) * beam_splitter(angle(rng));
            REQUIRE(verify_symplectic(s) < 1e-12);
            Eigen::Vector4d d;
            if (trial % 2 == 0) {
                d << 0.5, 0.5, 0.5, 0.5;
            } else {
                const double n1 = temp(rng), n2 = temp(rng);
                d << 0.5 * n1, 0.5 * n2, 0.5 * n1, 0.5 * n2;
            }
            const Eigen::Matrix4d v = s * d.asDiagonal() * s.transpose();
            const double value = simon_determinant_form(v);
            const Eigen::Matrix4d vt = flip.asDiagonal() * v * flip.asDiagonal();
            const double nu_min = symplectic_eigenvalues(vt)(0);
            if (std::abs(value) < 1e-10 || std::abs(nu_min - 0.5) < 1e-8) continue;
            ++kept;
            const bool oracle = nu_min < 0.5;
            CHECK((value < 0.0) == oracle);
            (oracle ? entangled_seen : separable_seen) += 1;
        }
        CHECK(kept >= 150);
        CHECK(entangled_seen >= 20);
        CHECK(separable_seen >= 20);
    }
}

TEST_CASE("scalar criterion vs generic PPT on the relaxed family", "[diagnostics]") {
    // the two differ by exactly gamma^2/2 after rescaling; signs agree
    // outside the band value in [0, gamma^2/2)
    int band_points = 0;
    for (int i = 0; i < 50; ++i) {
        const double eta = 0.01 + (2.0 - 0.01) * i / 49.0;
        for (int k = 0; k < 50; ++k) {
            const double gamma = 0.005 + (0.45 - 0.005) * k / 49.0;
            const double printed = simon_criterion(eta, gamma).value;
            const double general = simon_determinant_form(steady_state_covariance(2, eta, gamma));
            const double scale = std::max(1.0, std::abs(printed));
            CHECK_THAT(printed, WithinAbs(16.0 * general + 0.5 * gamma * gamma, 1e-12 * scale));
            if (printed >= 0.0 && printed < 0.5 * gamma * gamma) {
                ++band_points;
            } else {
                CHECK((printed < 0.0) == (general < 0.0));
            }
        }
    }
    CHECK(band_points >= 1);
}

TEST_CASE("two-mode purity", "[diagnostics]") {
    SECTION("uncoupled limit") {
        for (double eta : {0.0, 0.4, 1.3}) {
            CHECK_THAT(two_mode_purity(eta, 0.0), WithinRel(1.0 / (std::cosh(eta) * std::cosh(eta)), 1e-14));
        }
    }
    SECTION("truncation artifact above 1 is reported, not clamped") {
        CHECK_THAT(two_mode_purity(0.0, 0.1), WithinAbs(1.0 / 0.9975, 1e-15));
        CHECK(two_mode_purity(0.0, 0.1) > 1.0);
    }
    SECTION("matches the determinant of the relaxed matrix") {
        for (double eta : {0.3, 0.8, 1.5}) {
            for (double gamma : {0.02, 0.1, 0.3}) {
                CHECK_THAT(two_mode_purity(eta, gamma),
                           WithinRel(purity(steady_state_covariance(2, eta, gamma)), 1e-13));
            }
        }
    }
    SECTION("argument validation") {
        CHECK_THROWS_AS(two_mode_purity(0.5, -0.1), std::invalid_argument);
        CHECK_THROWS_AS(two_mode_purity(0.5, 0.7), std::invalid_argument);
    }
}

TEST_CASE("equilibration distance", "[diagnostics]") {
    SECTION("zero for a series equal to the target") {
        CovarianceMatrix target = boltzmann_covariance(1.0);
        std::vector<std::pair<double, CovarianceMatrix>> series{{0.0, target}, {1.5, target}};
        for (const auto& [t, d] : equilibration_distance(series, target)) CHECK(d == 0.0);
    }
    SECTION("max-abs elementwise distance") {
        CovarianceMatrix target = CovarianceMatrix::Zero(2, 2);
        CovarianceMatrix v(2, 2);
        v << 0.1, -0.7, -0.7, 0.3;
        auto out = equilibration_distance({{2.0, v}}, target);
        REQUIRE(out.size() == 1);
        CHECK(out[0].first == 2.0);
        CHECK(out[0].second == 0.7);
    }
    SECTION("dimension mismatch") {
        CovarianceMatrix target = CovarianceMatrix::Zero(4, 4);
        std::vector<std::pair<double, CovarianceMatrix>> series{{0.0, CovarianceMatrix::Zero(2, 2)}};
        CHECK_THROWS_AS(equilibration_distance(series, target), std::invalid_argument);
    }
    SECTION("uncoupled oscillator never equilibrates") {
        const double eta = 0.3, mu = 1.2;
        ChainParams params(1, 0.0);
        auto v0 = initial_covariance(params, {eta, mu, {1}});
        CovarianceMatrix target = boltzmann_covariance(effective_beta(eta));
        std::vector<std::pair<double, CovarianceMatrix>> series;
        const double period = 6.283185307179586;
        for (int k = 0; k <= 200; ++k) {
            const double t = period * k / 200.0;
            series.emplace_back(t, evolve(v0, propagator(params, t)));
        }
        auto dist = equilibration_distance(series, target);
        double dmin = 1e300;
        for (const auto& [t, d] : dist) dmin = std::min(dmin, d);
        CHECK(dmin > 0.01);
        // one full period returns to the start
        CHECK_THAT(dist.front().second, WithinAbs(dist.back().second, 1e-12));
    }
}

TEST_CASE("equilibrium report", "[diagnostics]") {
    SECTION("fields are consistent with the free functions") {
        const double eta = 0.8, gamma = 0.07;
        auto r = equilibrium_report(eta, gamma);
        CHECK(r.eta == eta);
        CHECK(r.gamma == gamma);
        CHECK(r.beta == effective_beta(eta));
        CHECK(r.n_bar == mean_occupation(eta));
        CHECK(r.nu2 == two_mode_purity(eta, gamma));
        CHECK(r.simon_value == simon_criterion(eta, gamma).value);
        CHECK(r.entangled == simon_criterion(eta, gamma).entangled);
        CHECK_THAT(r.entropy1, WithinRel(entropy_from_purity(r.nu1), 1e-15));
    }
    SECTION("nu1 equals the purity of the relaxed single mode") {
        for (double eta : {0.1, 0.6, 1.7}) {
            auto r = equilibrium_report(eta, 0.05);
            CHECK_THAT(r.nu1, WithinAbs(1.0 / std::cosh(eta), 1e-15));
            CHECK_THAT(r.nu1, WithinRel(purity(steady_state_covariance(1, eta, 0.05)), 1e-12));
        }
    }
    SECTION("round trip through beta") {
        auto r = equilibrium_report(1.3, 0.02);
        CHECK_THAT(std::cosh(eta_from_beta(r.beta)), WithinRel(std::cosh(1.3), 1e-12));
    }
    SECTION("boundary band carries the documented offset") {
        const double gamma = 0.1;
        const double star = simon_boundary_eta(gamma);
        // pick a point just past the scalar boundary: scalar separable,
        // generic PPT still entangled
        const double eta = star + 1e-3;
        auto r = equilibrium_report(eta, gamma);
        CHECK_FALSE(r.entangled);
        CHECK(r.simon_value >= 0.0);
        CHECK(r.simon_general < 0.0);
        CHECK_THAT(r.simon_value, WithinAbs(16.0 * r.simon_general + 0.5 * gamma * gamma, 1e-13));
    }
}
