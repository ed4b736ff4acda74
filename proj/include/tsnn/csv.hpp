#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tsnn/distances.hpp"
#include "tsnn/estimators.hpp"
#include "tsnn/model.hpp"

namespace tsnn {

/// Shortest decimal form that round-trips the exact double. All numeric CSV
/// output goes through here so read(write(x)) == x.
inline std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view token, const std::string& where) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw io_error("unparseable numeric token '" + std::string(token) + "' at " + where);
    if (!std::isfinite(value))
        throw io_error("non-finite value '" + std::string(token) + "' at " + where);
    return value;
}

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

/// Matrix CSV: one line per row, comma-separated, missing entries written as
/// the empty field; readers also accept the literal NA token. No header
/// unless the flag says to skip one line.
inline ObservedMatrix read_matrix_csv(const std::string& path, bool header = false) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::vector<std::vector<std::string>> raw;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (header && first) {
            first = false;
            continue;
        }
        first = false;
        std::string_view view(line);
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        if (view.empty() && raw.empty() && in.peek() == EOF) break;
        std::vector<std::string> row;
        for (std::string_view f : detail::split_csv_line(view)) row.emplace_back(detail::trim(f));
        raw.push_back(std::move(row));
    }
    if (raw.empty()) throw io_error("'" + path + "' contains no data rows");
    const std::size_t m = raw[0].size();
    for (std::size_t i = 1; i < raw.size(); ++i)
        if (raw[i].size() != m)
            throw io_error("ragged row " + std::to_string(i + 1) + " in '" + path + "': expected " +
                           std::to_string(m) + " fields, got " + std::to_string(raw[i].size()));

    ObservedMatrix matrix(static_cast<int>(raw.size()), static_cast<int>(m));
    for (std::size_t i = 0; i < raw.size(); ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const std::string& token = raw[i][j];
            if (token.empty() || token == "NA") continue;
            const std::string where =
                "'" + path + "' row " + std::to_string(i + 1) + " col " + std::to_string(j + 1);
            matrix.values(static_cast<int>(i), static_cast<int>(j)) = parse_double(token, where);
            matrix.mask(static_cast<int>(i), static_cast<int>(j)) = 1;
        }
    return matrix;
}

inline void write_matrix_csv(const ObservedMatrix& matrix, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    for (int i = 0; i < matrix.rows(); ++i) {
        for (int j = 0; j < matrix.cols(); ++j) {
            if (j) out << ',';
            if (matrix.observed(i, j)) out << format_double(matrix.values(i, j));
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed on '" + path + "'");
}

inline void write_dense_csv(const Grid<double>& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    for (int i = 0; i < grid.rows(); ++i) {
        for (int j = 0; j < grid.cols(); ++j) {
            if (j) out << ',';
            out << format_double(grid(i, j));
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed on '" + path + "'");
}

/// Completed matrix; undefined entries (no fallback) become empty fields.
inline void write_result_csv(const CompletionResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    for (int i = 0; i < result.theta_hat.rows(); ++i) {
        for (int j = 0; j < result.theta_hat.cols(); ++j) {
            if (j) out << ',';
            if (std::isfinite(result.theta_hat(i, j))) out << format_double(result.theta_hat(i, j));
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed on '" + path + "'");
}

inline void write_counts_csv(const CompletionResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    for (int i = 0; i < result.neighbor_count.rows(); ++i) {
        for (int j = 0; j < result.neighbor_count.cols(); ++j) {
            if (j) out << ',';
            out << result.neighbor_count(i, j);
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed on '" + path + "'");
}

inline void write_mask_csv(const Grid<std::uint8_t>& mask, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    for (int i = 0; i < mask.rows(); ++i) {
        for (int j = 0; j < mask.cols(); ++j) {
            if (j) out << ',';
            out << (mask(i, j) ? 1 : 0);
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed on '" + path + "'");
}

/// Debug dump of a distance table; infinite entries use the `inf` token.
inline void write_distance_csv(const DistanceTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    for (int a = 0; a < table.size(); ++a) {
        for (int b = 0; b < table.size(); ++b) {
            if (b) out << ',';
            const double d = table.d_sq(a, b);
            if (std::isinf(d))
                out << "inf";
            else
                out << format_double(d);
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed on '" + path + "'");
}

/// Generic row-oriented table writer for study outputs.
inline void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (k) out << ',';
        out << header[k];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out << ',';
            out << row[k];
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed on '" + path + "'");
}

}  // namespace tsnn
