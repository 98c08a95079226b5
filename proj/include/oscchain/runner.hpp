#pragma once

#include <oscchain/chain.hpp>
#include <oscchain/config.hpp>
#include <oscchain/continuum.hpp>
#include <oscchain/diagnostics.hpp>
#include <oscchain/gaussian.hpp>
#include <oscchain/io.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace oscchain {

// A failure of the numerics (not of the configuration); carries the grid
// time at which it occurred and maps to CLI exit code 3.
struct NumericalError : std::runtime_error {
    double time = 0.0;
    NumericalError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
};

inline std::vector<int> effective_sites(const RunConfig& cfg) {
    return cfg.system_sites.empty() ? default_system_sites(cfg.n) : cfg.system_sites;
}

// Default element selection: every site pair (s <= l) for all three blocks.
inline std::vector<ElementSelector> effective_elements(const RunConfig& cfg, const std::vector<int>& sites) {
    if (!cfg.elements.empty()) return cfg.elements;
    std::vector<ElementSelector> out;
    for (size_t i = 0; i < sites.size(); ++i) {
        for (size_t k = i; k < sites.size(); ++k) {
            out.push_back({Block::QQ, sites[i], sites[k]});
            out.push_back({Block::PP, sites[i], sites[k]});
            out.push_back({Block::QP, sites[i], sites[k]});
        }
    }
    return out;
}

inline const char* block_name(Block b) {
    switch (b) {
        case Block::QQ: return "QQ";
        case Block::PP: return "PP";
        default: return "QP";
    }
}

namespace detail {

// Runs body(i) for i in [0, count) on a bounded pool.  Results must be
// written to preallocated index-addressed slots, which keeps output
// independent of the thread count.  The lowest-index exception wins.
template <typename F>
inline void parallel_for(int count, int threads, F&& body) {
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<size_t>(count));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                errors[static_cast<size_t>(i)] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace detail

// Dense finite-chain evolution: per grid time, build S(t), evolve the full
// covariance, reduce to the system sites, and record state diagnostics
// together with the symplectic residual of S.
inline OutputTable run_finite(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.mode != RunMode::Finite) throw ConfigError("run_finite: mode is not finite");
    const ChainParams params(cfg.n, cfg.epsilon, cfg.omega);
    const std::vector<int> sites = effective_sites(cfg);
    const PrepSpec prep{cfg.eta, cfg.mu, sites};
    const CovarianceMatrix v0 = initial_covariance(params, prep);
    const ModeSpectrum spectrum = mode_spectrum(params);
    const std::vector<double> times = time_grid(cfg.t_grid);
    const int n_sites = static_cast<int>(sites.size());

    OutputTable table;
    table.schema = "oscchain.finite.v1";
    table.columns = {"t", "nu", "entropy"};
    for (int s : sites) {
        table.columns.push_back("qq_" + std::to_string(s));
        table.columns.push_back("pp_" + std::to_string(s));
        table.columns.push_back("qp_" + std::to_string(s));
    }
    table.columns.push_back("symplectic_residual");
    table.rows.resize(times.size());

    CovarianceMatrix final_v;
    detail::parallel_for(static_cast<int>(times.size()), cfg.threads, [&](int i) {
        const double t = times[static_cast<size_t>(i)];
        try {
            const Propagator s = propagator(params, spectrum, t);
            const double resid = verify_symplectic(s.matrix);
            const CovarianceMatrix v = evolve(v0, s);
            const SubsystemState sub = reduce_subsystem(v, sites);
            auto row = nlohmann::ordered_json::array();
            row.push_back(t);
            row.push_back(sub.nu);
            row.push_back(sub.entropy);
            for (int k = 0; k < n_sites; ++k) {
                row.push_back(sub.v_sub(k, k));
                row.push_back(sub.v_sub(n_sites + k, n_sites + k));
                row.push_back(sub.v_sub(k, n_sites + k));
            }
            row.push_back(resid);
            table.rows[static_cast<size_t>(i)] = std::move(row);
            if (!cfg.cov_out.empty() && i + 1 == static_cast<int>(times.size())) final_v = v;
        } catch (const std::exception& e) {
            throw NumericalError(std::string(e.what()) + " (t = " + format_double(t) + ")", t);
        }
    });
    if (!cfg.cov_out.empty()) write_covariance_file(cfg.cov_out, times.back(), final_v);
    return table;
}

// Continuum covariance elements over the time grid, optionally with the
// weak-coupling closed form and its relative difference side by side.  A
// quadrature failure leaves a null cell and is reported on stderr; the run
// continues and the failure count is returned with the table.
inline OutputTable run_continuum(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.mode != RunMode::Continuum) throw ConfigError("run_continuum: mode is not continuum");
    const std::vector<int> sites = effective_sites(cfg);
    ContinuumParams cp;
    cp.eta = cfg.eta;
    cp.mu = cfg.mu;
    cp.gamma = cfg.gamma;
    cp.Omega = cfg.omega;
    cp.system_sites = sites;
    cp.validate();
    const std::vector<ElementSelector> elements = effective_elements(cfg, sites);
    const std::vector<double> times = time_grid(cfg.t_grid);
    QuadratureOptions opt;
    opt.abs_tol = cfg.quadrature_tol;

    OutputTable table;
    table.schema = "oscchain.continuum.v1";
    table.columns = {"t"};
    for (const auto& el : elements) {
        const std::string base =
            std::string(block_name(el.block)) + "_" + std::to_string(el.s) + "_" + std::to_string(el.l);
        table.columns.push_back(base);
        if (cfg.weak_columns) {
            table.columns.push_back(base + "_weak");
            table.columns.push_back(base + "_reldiff");
        }
    }
    table.rows.resize(times.size());

    std::atomic<int> failures{0};
    std::mutex log_mutex;
    detail::parallel_for(static_cast<int>(times.size()), cfg.threads, [&](int i) {
        const double t = times[static_cast<size_t>(i)];
        auto row = nlohmann::ordered_json::array();
        row.push_back(t);
        for (const auto& el : elements) {
            bool ok = true;
            double value = 0.0;
            try {
                value = covariance_element_continuum(el.block, el.s, el.l, t, cp, opt);
            } catch (const QuadratureError& e) {
                ok = false;
                failures.fetch_add(1);
                std::lock_guard<std::mutex> lock(log_mutex);
                std::cerr << "oscchain: quadrature failed for " << block_name(el.block) << "(" << el.s << ","
                          << el.l << ") at t = " << format_double(t) << ": " << e.what() << "\n";
            }
            if (ok) row.push_back(value);
            else row.push_back(nullptr);
            if (cfg.weak_columns) {
                const double weak = covariance_element_weak(el.block, el.s, el.l, t, cp);
                row.push_back(weak);
                if (ok) row.push_back(std::abs(weak - value) / std::max(std::abs(value), 0.25));
                else row.push_back(nullptr);
            }
        }
        table.rows[static_cast<size_t>(i)] = std::move(row);
    });
    table.failures = failures.load();
    return table;
}

namespace detail {

inline nlohmann::ordered_json report_row(const EquilibriumReport& r) {
    auto row = nlohmann::ordered_json::array();
    row.push_back(r.eta);
    row.push_back(r.gamma);
    row.push_back(r.beta);
    row.push_back(r.n_bar);
    row.push_back(r.nu1);
    row.push_back(r.nu2);
    row.push_back(r.entropy1);
    row.push_back(r.simon_value);
    row.push_back(r.simon_general);
    row.push_back(r.entangled);
    return row;
}

inline std::vector<std::string> report_columns() {
    return {"eta", "gamma",    "beta",        "n_bar",         "nu1",
            "nu2", "entropy1", "simon_value", "simon_general", "entangled"};
}

} // namespace detail

// Analytic relaxed-state diagnostics at a single (eta, gamma) point; the
// n-mode stationary covariance itself goes to cov_out when requested.
inline OutputTable run_steady(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.mode != RunMode::Steady) throw ConfigError("run_steady: mode is not steady");
    OutputTable table;
    table.schema = "oscchain.steady.v1";
    table.columns = detail::report_columns();
    table.rows.push_back(detail::report_row(equilibrium_report(cfg.eta, cfg.gamma)));
    if (!cfg.cov_out.empty()) {
        write_covariance_file(cfg.cov_out, std::numeric_limits<double>::infinity(),
                              steady_state_covariance(cfg.n, cfg.eta, cfg.gamma));
    }
    return table;
}

// Diagnostic records over the (eta, gamma) grid, gamma-major; each row
// carries the entanglement threshold eta* of its gamma.
inline OutputTable run_sweep(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.mode != RunMode::Sweep) throw ConfigError("run_sweep: mode is not sweep");
    const std::vector<double> etas = grid_points(cfg.eta_start, cfg.eta_stop, cfg.eta_steps);
    std::vector<double> stars;
    stars.reserve(cfg.gamma_list.size());
    for (double g : cfg.gamma_list) stars.push_back(simon_boundary_eta(g));

    OutputTable table;
    table.schema = "oscchain.sweep.v1";
    table.columns = detail::report_columns();
    table.columns.push_back("eta_star");
    const int per_gamma = static_cast<int>(etas.size());
    const int count = per_gamma * static_cast<int>(cfg.gamma_list.size());
    table.rows.resize(static_cast<size_t>(count));
    detail::parallel_for(count, cfg.threads, [&](int i) {
        const size_t gi = static_cast<size_t>(i / per_gamma);
        const double eta = etas[static_cast<size_t>(i % per_gamma)];
        auto row = detail::report_row(equilibrium_report(eta, cfg.gamma_list[gi]));
        row.push_back(stars[gi]);
        table.rows[static_cast<size_t>(i)] = std::move(row);
    });
    return table;
}

// Serializes to cfg.out (stdout when empty) in the configured format.
inline void write_table(const OutputTable& table, const RunConfig& cfg) {
    const auto emit = [&](std::ostream& os) {
        if (cfg.format == OutputFormat::Csv) to_csv(os, table);
        else to_json(os, table);
    };
    if (cfg.out.empty()) {
        emit(std::cout);
        return;
    }
    std::ofstream os(cfg.out);
    if (!os) throw ConfigError("cannot open output file '" + cfg.out + "'");
    emit(os);
    if (!os) throw ConfigError("write to '" + cfg.out + "' failed");
}

} // namespace oscchain
