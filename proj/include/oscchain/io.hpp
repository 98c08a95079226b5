#pragma once

#include <oscchain/gaussian.hpp>

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscchain {

// 17 significant digits: enough to round trip any double exactly, locale
// independent.  Non-finite values print as inf/-inf/nan.
inline std::string format_double(double v) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

// Tabular run output: a schema tag, column names, and rows of JSON cells
// (numbers, booleans, strings, or null for a failed evaluation).
struct OutputTable {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<nlohmann::ordered_json> rows;
    int failures = 0;
};

namespace detail {

inline std::string render_cell(const nlohmann::ordered_json& cell) {
    if (cell.is_null()) return "nan";
    if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
    if (cell.is_number_integer()) return std::to_string(cell.get<std::int64_t>());
    if (cell.is_number_float()) return format_double(cell.get<double>());
    if (cell.is_string()) return cell.get<std::string>();
    throw std::logic_error("render_cell: unsupported cell type");
}

} // namespace detail

inline void to_csv(std::ostream& os, const OutputTable& table) {
    os << "# " << table.schema << "\n";
    for (size_t c = 0; c < table.columns.size(); ++c)
        os << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
    os << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::logic_error("to_csv: row width does not match column count");
        for (size_t c = 0; c < row.size(); ++c)
            os << detail::render_cell(row[c]) << (c + 1 < row.size() ? "," : "");
        os << "\n";
    }
}

inline void to_json(std::ostream& os, const OutputTable& table) {
    nlohmann::ordered_json j;
    j["schema"] = table.schema;
    j["columns"] = table.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::logic_error("to_json: row width does not match column count");
        j["rows"].push_back(row);
    }
    os << j.dump(2) << "\n";
}

// Covariance snapshot as text: "<dim> <t>" then dim rows of dim entries.
inline void write_covariance_text(std::ostream& os, double t, const CovarianceMatrix& v) {
    if (v.rows() != v.cols() || v.rows() == 0)
        throw std::invalid_argument("write_covariance_text: matrix must be square and nonempty");
    os << v.rows() << " " << format_double(t) << "\n";
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index k = 0; k < v.cols(); ++k)
            os << format_double(v(i, k)) << (k + 1 < v.cols() ? " " : "");
        os << "\n";
    }
}

namespace detail {

inline double parse_double_token(std::istream& is, const char* what) {
    std::string tok;
    if (!(is >> tok)) throw std::runtime_error(std::string("covariance text: missing ") + what);
    double v = 0.0;
    auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size())
        throw std::runtime_error(std::string("covariance text: bad ") + what + " '" + tok + "'");
    return v;
}

} // namespace detail

inline std::pair<double, CovarianceMatrix> read_covariance_text(std::istream& is) {
    long long dim = 0;
    if (!(is >> dim) || dim <= 0) throw std::runtime_error("covariance text: bad dimension header");
    const double t = detail::parse_double_token(is, "time");
    CovarianceMatrix v(dim, dim);
    for (long long i = 0; i < dim; ++i)
        for (long long k = 0; k < dim; ++k) v(i, k) = detail::parse_double_token(is, "matrix entry");
    return {t, v};
}

inline void write_covariance_file(const std::string& path, double t, const CovarianceMatrix& v) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_covariance_text(os, t, v);
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::pair<double, CovarianceMatrix> read_covariance_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_covariance_text(is);
}

} // namespace oscchain
