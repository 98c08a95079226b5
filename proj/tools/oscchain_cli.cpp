#include <oscchain/checks.hpp>
#include <oscchain/config.hpp>
#include <oscchain/runner.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

int run_checks() {
    bool all_passed = true;
    for (const auto& r : oscchain::run_all_checks()) {
        std::cout << (r.passed ? "PASS" : "FAIL") << " " << r.name << " (" << r.detail << ")\n";
        all_passed = all_passed && r.passed;
    }
    return all_passed ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"oscillator-chain covariance dynamics toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, format_name;
    double tol = 0.0;
    int threads = 0;
    auto* opt_config = app.add_option("--config", config_path, "key = value config file");
    auto* opt_out = app.add_option("--out", out_path, "output path (default stdout)");
    auto* opt_format =
        app.add_option("--format", format_name, "output format")->check(CLI::IsMember({"csv", "json"}));
    auto* opt_tol = app.add_option("--tol", tol, "quadrature absolute tolerance");
    auto* opt_threads = app.add_option("--threads", threads, "worker pool size");

    auto* cmd_finite = app.add_subcommand("finite", "dense finite-chain evolution over the time grid");
    auto* cmd_continuum = app.add_subcommand("continuum", "half-infinite chain covariance elements");
    auto* cmd_steady = app.add_subcommand("steady", "relaxed-state diagnostics at one (eta, gamma) point");
    auto* cmd_sweep = app.add_subcommand("sweep", "diagnostics over an (eta, gamma) grid");
    auto* cmd_check = app.add_subcommand("check", "run the invariant suites and report pass/fail");
    // let the shared flags be given either before or after the subcommand
    for (auto* cmd : {cmd_finite, cmd_continuum, cmd_steady, cmd_sweep, cmd_check})
        cmd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (cmd_check->parsed()) return run_checks();

    oscchain::RunConfig cfg;
    try {
        if (*opt_config) cfg = oscchain::load_config_file(config_path, cfg);
        if (*opt_out) cfg.out = out_path;
        if (*opt_format) cfg.format = format_name == "json" ? oscchain::OutputFormat::Json : oscchain::OutputFormat::Csv;
        if (*opt_tol) cfg.quadrature_tol = tol;
        if (*opt_threads) cfg.threads = threads;
        if (cmd_finite->parsed()) cfg.mode = oscchain::RunMode::Finite;
        if (cmd_continuum->parsed()) cfg.mode = oscchain::RunMode::Continuum;
        if (cmd_steady->parsed()) cfg.mode = oscchain::RunMode::Steady;
        if (cmd_sweep->parsed()) cfg.mode = oscchain::RunMode::Sweep;
        oscchain::validate_config(cfg);
    } catch (const oscchain::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        oscchain::OutputTable table;
        switch (cfg.mode) {
            case oscchain::RunMode::Finite: table = oscchain::run_finite(cfg); break;
            case oscchain::RunMode::Continuum: table = oscchain::run_continuum(cfg); break;
            case oscchain::RunMode::Steady: table = oscchain::run_steady(cfg); break;
            case oscchain::RunMode::Sweep: table = oscchain::run_sweep(cfg); break;
        }
        oscchain::write_table(table, cfg);
        if (table.failures > 0) {
            std::cerr << "oscchain: " << table.failures << " element(s) failed to converge\n";
            return 3;
        }
    } catch (const oscchain::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const oscchain::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const oscchain::QuadratureError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
