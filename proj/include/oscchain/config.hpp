#pragma once

#include <oscchain/continuum.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscchain {

// Configuration problems map to exit code 2 in the CLI, as opposed to
// numerical failures (exit 3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { Finite, Continuum, Steady, Sweep };
enum class OutputFormat { Csv, Json };

struct ElementSelector {
    Block block = Block::QQ;
    int s = 1;
    int l = 1;
};

struct TimeGrid {
    double start = 0.0;
    double stop = 0.0;
    int steps = 1;
};

// steps is the number of grid points; a single point lands on `stop`.
inline std::vector<double> grid_points(double start, double stop, int steps) {
    if (steps < 1) throw ConfigError("grid: steps must be >= 1");
    if (steps == 1) return {stop};
    std::vector<double> out(static_cast<size_t>(steps));
    for (int k = 0; k < steps; ++k) out[static_cast<size_t>(k)] = start + (stop - start) * k / (steps - 1);
    return out;
}

inline std::vector<double> time_grid(const TimeGrid& g) { return grid_points(g.start, g.stop, g.steps); }

struct RunConfig {
    RunMode mode = RunMode::Finite;
    int n = 64;
    double epsilon = 0.1; // finite-chain coupling
    double gamma = 0.05;  // continuum coupling
    double omega = 1.0;   // finite: bare frequency; continuum family: renormalized frequency
    double eta = 0.0;
    double mu = 0.0;
    std::vector<int> system_sites; // empty: the chain-center site
    TimeGrid t_grid;
    double quadrature_tol = 1e-10;
    std::string out; // empty: stdout
    OutputFormat format = OutputFormat::Csv;
    int threads = 1;
    unsigned long seed = 0; // reserved for future stochastic features
    bool weak_columns = false;
    std::vector<ElementSelector> elements; // empty: all site pairs, all blocks
    std::string cov_out;                   // optional covariance snapshot path
    int max_n = 5000;
    double eta_start = 0.0;
    double eta_stop = 2.0;
    int eta_steps = 21;
    std::vector<double> gamma_list{0.01, 0.05, 0.1};
};

inline std::vector<int> default_system_sites(int n) { return {(n + 1) / 2}; }

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] inline void key_error(const std::string& key, int line, const std::string& msg) {
    std::ostringstream os;
    os << "key '" << key << "' (line " << line << "): " << msg;
    throw ConfigError(os.str());
}

inline double parse_config_double(const std::string& key, int line, const std::string& value) {
    double v = 0.0;
    auto r = std::from_chars(value.data(), value.data() + value.size(), v);
    if (r.ec != std::errc{} || r.ptr != value.data() + value.size())
        key_error(key, line, "expected a number, got '" + value + "'");
    return v;
}

inline long long parse_config_int(const std::string& key, int line, const std::string& value) {
    long long v = 0;
    auto r = std::from_chars(value.data(), value.data() + value.size(), v);
    if (r.ec != std::errc{} || r.ptr != value.data() + value.size())
        key_error(key, line, "expected an integer, got '" + value + "'");
    return v;
}

inline bool parse_config_bool(const std::string& key, int line, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    key_error(key, line, "expected true or false, got '" + value + "'");
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(value);
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

inline Block parse_block_name(const std::string& key, int line, const std::string& name) {
    if (name == "QQ") return Block::QQ;
    if (name == "PP") return Block::PP;
    if (name == "QP") return Block::QP;
    key_error(key, line, "expected block QQ, PP or QP, got '" + name + "'");
}

} // namespace detail

// key = value lines; '#' starts a comment, [section] headers are ignored.
// Unknown and duplicate keys are errors that name the key and line.
inline RunConfig parse_config_text(std::istream& is, RunConfig cfg = {}) {
    using detail::key_error;
    std::string raw;
    std::set<std::string> seen;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string text = detail::trim(raw);
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']') throw ConfigError("line " + std::to_string(line) + ": unterminated section header");
            continue;
        }
        const size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected key = value, got '" + text + "'");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
        if (!seen.insert(key).second) key_error(key, line, "duplicate key");

        if (key == "mode") {
            if (value == "finite") cfg.mode = RunMode::Finite;
            else if (value == "continuum") cfg.mode = RunMode::Continuum;
            else if (value == "steady") cfg.mode = RunMode::Steady;
            else if (value == "sweep") cfg.mode = RunMode::Sweep;
            else key_error(key, line, "expected finite, continuum, steady or sweep, got '" + value + "'");
        } else if (key == "N") {
            cfg.n = static_cast<int>(detail::parse_config_int(key, line, value));
        } else if (key == "epsilon") {
            cfg.epsilon = detail::parse_config_double(key, line, value);
        } else if (key == "gamma") {
            cfg.gamma = detail::parse_config_double(key, line, value);
        } else if (key == "omega") {
            cfg.omega = detail::parse_config_double(key, line, value);
        } else if (key == "eta") {
            cfg.eta = detail::parse_config_double(key, line, value);
        } else if (key == "mu") {
            cfg.mu = detail::parse_config_double(key, line, value);
        } else if (key == "system_sites") {
            cfg.system_sites.clear();
            for (const auto& item : detail::split_list(value))
                cfg.system_sites.push_back(static_cast<int>(detail::parse_config_int(key, line, item)));
        } else if (key == "t_start") {
            cfg.t_grid.start = detail::parse_config_double(key, line, value);
        } else if (key == "t_stop") {
            cfg.t_grid.stop = detail::parse_config_double(key, line, value);
        } else if (key == "t_steps") {
            cfg.t_grid.steps = static_cast<int>(detail::parse_config_int(key, line, value));
        } else if (key == "tol") {
            cfg.quadrature_tol = detail::parse_config_double(key, line, value);
        } else if (key == "out") {
            cfg.out = value;
        } else if (key == "format") {
            if (value == "csv") cfg.format = OutputFormat::Csv;
            else if (value == "json") cfg.format = OutputFormat::Json;
            else key_error(key, line, "expected csv or json, got '" + value + "'");
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(detail::parse_config_int(key, line, value));
        } else if (key == "seed") {
            cfg.seed = static_cast<unsigned long>(detail::parse_config_int(key, line, value));
        } else if (key == "weak_columns") {
            cfg.weak_columns = detail::parse_config_bool(key, line, value);
        } else if (key == "elements") {
            cfg.elements.clear();
            for (const auto& item : detail::split_list(value)) {
                const size_t c1 = item.find(':');
                const size_t c2 = c1 == std::string::npos ? std::string::npos : item.find(':', c1 + 1);
                if (c1 == std::string::npos || c2 == std::string::npos)
                    key_error(key, line, "expected BLOCK:s:l, got '" + item + "'");
                ElementSelector sel;
                sel.block = detail::parse_block_name(key, line, detail::trim(item.substr(0, c1)));
                sel.s = static_cast<int>(detail::parse_config_int(key, line, detail::trim(item.substr(c1 + 1, c2 - c1 - 1))));
                sel.l = static_cast<int>(detail::parse_config_int(key, line, detail::trim(item.substr(c2 + 1))));
                cfg.elements.push_back(sel);
            }
        } else if (key == "cov_out") {
            cfg.cov_out = value;
        } else if (key == "max_N") {
            cfg.max_n = static_cast<int>(detail::parse_config_int(key, line, value));
        } else if (key == "eta_start") {
            cfg.eta_start = detail::parse_config_double(key, line, value);
        } else if (key == "eta_stop") {
            cfg.eta_stop = detail::parse_config_double(key, line, value);
        } else if (key == "eta_steps") {
            cfg.eta_steps = static_cast<int>(detail::parse_config_int(key, line, value));
        } else if (key == "gamma_list") {
            cfg.gamma_list.clear();
            for (const auto& item : detail::split_list(value))
                cfg.gamma_list.push_back(detail::parse_config_double(key, line, item));
        } else {
            key_error(key, line, "unknown key");
        }
    }
    return cfg;
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config_text(is, std::move(base));
}

inline void validate_config(const RunConfig& cfg) {
    if (cfg.n < 1) throw ConfigError("N: must be >= 1");
    if (cfg.max_n < 1) throw ConfigError("max_N: must be >= 1");
    if (cfg.mode == RunMode::Finite && cfg.n > cfg.max_n)
        throw ConfigError("N: exceeds max_N = " + std::to_string(cfg.max_n));
    if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon)) throw ConfigError("epsilon: must be finite and >= 0");
    if (!(cfg.gamma >= 0.0) || cfg.gamma >= 0.5) throw ConfigError("gamma: must lie in [0, 1/2)");
    if (!(cfg.omega > 0.0) || !std::isfinite(cfg.omega)) throw ConfigError("omega: must be finite and > 0");
    if (!std::isfinite(cfg.eta)) throw ConfigError("eta: must be finite");
    if (!std::isfinite(cfg.mu)) throw ConfigError("mu: must be finite");
    if (cfg.t_grid.steps < 1) throw ConfigError("t_steps: must be >= 1");
    if (!std::isfinite(cfg.t_grid.start) || !std::isfinite(cfg.t_grid.stop))
        throw ConfigError("t_start/t_stop: must be finite");
    if (cfg.t_grid.stop < cfg.t_grid.start) throw ConfigError("t_stop: must be >= t_start");
    if (!(cfg.quadrature_tol >= 1e-14 && cfg.quadrature_tol <= 1e-4))
        throw ConfigError("tol: must lie in [1e-14, 1e-4]");
    if (cfg.threads < 1 || cfg.threads > 256) throw ConfigError("threads: must lie in [1, 256]");
    int prev = 0;
    for (int s : cfg.system_sites) {
        if (s <= prev) throw ConfigError("system_sites: must be strictly increasing and >= 1");
        prev = s;
    }
    const bool finite_indices = cfg.mode == RunMode::Finite || cfg.mode == RunMode::Steady;
    if (finite_indices && !cfg.system_sites.empty() && cfg.system_sites.back() > cfg.n)
        throw ConfigError("system_sites: site exceeds N");
    for (const auto& el : cfg.elements) {
        if (el.s < 1 || el.l < 1) throw ConfigError("elements: site indices must be >= 1");
        if (cfg.mode == RunMode::Finite && (el.s > cfg.n || el.l > cfg.n))
            throw ConfigError("elements: site index exceeds N");
    }
    if (cfg.mode == RunMode::Sweep) {
        if (cfg.eta_steps < 1) throw ConfigError("eta_steps: must be >= 1");
        if (!(cfg.eta_stop >= cfg.eta_start)) throw ConfigError("eta_stop: must be >= eta_start");
        if (cfg.gamma_list.empty()) throw ConfigError("gamma_list: must not be empty");
        for (double g : cfg.gamma_list)
            if (!(g >= 0.0) || g >= 0.5) throw ConfigError("gamma_list: entries must lie in [0, 1/2)");
    }
}

} // namespace oscchain
