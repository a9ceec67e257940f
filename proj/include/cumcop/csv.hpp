#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace cumcop {

struct CsvTable {
    std::vector<std::string> header;  // empty when the file has none
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

/// Parses a number; nullopt when the field is not entirely numeric.
inline std::optional<double> parse_double(std::string_view s) {
    s = detail::trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Reads a comma-separated file. The first line is a header when any of its
/// fields is non-numeric. Blank lines are ignored.
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        for (auto& f : fields) f = std::string(detail::trim(f));
        if (first) {
            first = false;
            bool numeric = true;
            for (const auto& f : fields) numeric = numeric && parse_double(f).has_value();
            if (!numeric) {
                t.header = std::move(fields);
                continue;
            }
        }
        t.rows.push_back(std::move(fields));
        t.line_numbers.push_back(lineno);
    }
    return t;
}

/// n x d numeric matrix from a CSV file (optional header, every field numeric).
inline Matrix read_matrix_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    if (t.rows.empty()) throw data_error("'" + path + "' has no data rows");
    const std::size_t d = t.rows.front().size();
    Matrix m(t.rows.size(), d);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i].size() != d)
            throw data_error("line " + std::to_string(t.line_numbers[i]) + " of '" + path + "' has " +
                             std::to_string(t.rows[i].size()) + " fields, expected " + std::to_string(d));
        for (std::size_t k = 0; k < d; ++k) {
            const auto v = parse_double(t.rows[i][k]);
            if (!v || !std::isfinite(*v))
                throw data_error("line " + std::to_string(t.line_numbers[i]) + " of '" + path + "': '" + t.rows[i][k] +
                                 "' is not a finite number");
            m(i, k) = *v;
        }
    }
    return m;
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

/// Quotes a field when it contains a comma, quote or newline.
inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace cumcop
