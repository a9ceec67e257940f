#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "alpha.hpp"
#include "copula.hpp"
#include "csv.hpp"
#include "empirical.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "measures.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "rank_matrix.hpp"

namespace cumcop {

using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD (a trailing time part after 'T' or ' ' is ignored).
inline Date parse_date(std::string_view s) {
    int y = 0;
    unsigned m = 0, d = 0;
    const std::string str(s.substr(0, 10));
    char extra = 0;
    if (s.size() < 10 || std::sscanf(str.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &extra) != 3 || str[4] != '-' || str[7] != '-')
        throw data_error("cannot parse date '" + std::string(s) + "' (expected YYYY-MM-DD)");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw data_error("invalid calendar date '" + std::string(s) + "'");
    return Date(ymd);
}

inline std::string format_date(Date d) {
    const std::chrono::year_month_day ymd(d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

/// Observations with strictly increasing dates.
struct DatedSeries {
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const noexcept { return dates.size(); }
};

struct LoadedSeries {
    DatedSeries series;
    std::size_t skipped = 0;  // rows with a missing value ("." or empty)
};

namespace detail {

inline std::size_t resolve_column(const CsvTable& t, const std::string& col, const std::string& path) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == col) return i;
    if (const auto v = parse_double(col); v && *v >= 0 && std::floor(*v) == *v) return static_cast<std::size_t>(*v);
    throw data_error("column '" + col + "' not found in '" + path + "'");
}

}  // namespace detail

/// Loads a dated series from CSV. Columns are given by header name or by
/// 0-based index. Missing values ("." as in FRED exports, or empty) are
/// skipped and counted; the result is sorted by date.
inline LoadedSeries load_series(const std::string& path, const std::string& date_column, const std::string& value_column) {
    const CsvTable t = read_csv(path);
    const std::size_t dc = detail::resolve_column(t, date_column, path);
    const std::size_t vc = detail::resolve_column(t, value_column, path);
    LoadedSeries out;
    std::vector<std::pair<Date, double>> obs;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        if (dc >= row.size() || vc >= row.size())
            throw data_error("line " + std::to_string(t.line_numbers[i]) + " of '" + path + "' is too short");
        const std::string& raw = row[vc];
        if (raw.empty() || raw == "." || raw == "NA" || raw == "null") {
            ++out.skipped;
            continue;
        }
        const auto v = parse_double(raw);
        if (!v || !std::isfinite(*v))
            throw data_error("line " + std::to_string(t.line_numbers[i]) + " of '" + path + "': bad value '" + raw + "'");
        obs.emplace_back(parse_date(row[dc]), *v);
    }
    if (obs.empty()) throw data_error("'" + path + "' contains no usable observations");
    std::stable_sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < obs.size(); ++i)
        if (obs[i].first == obs[i - 1].first) throw data_error("duplicate date " + format_date(obs[i].first) + " in '" + path + "'");
    for (const auto& [d, v] : obs) {
        out.series.dates.push_back(d);
        out.series.values.push_back(v);
    }
    return out;
}

/// r_t = ln(P_t / P_{t-1}), dated by the later day.
inline DatedSeries log_returns(const DatedSeries& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!(s.values[i] > 0.0)) throw data_error("non-positive price " + std::to_string(s.values[i]) + " on " + format_date(s.dates[i]));
    DatedSeries out;
    for (std::size_t i = 1; i < s.size(); ++i) {
        out.dates.push_back(s.dates[i]);
        out.values.push_back(std::log(s.values[i] / s.values[i - 1]));
    }
    return out;
}

struct AlignedPairs {
    std::vector<Date> dates;
    Matrix values;  // n x 2
};

/// Inner join on dates, in date order.
inline AlignedPairs align(const DatedSeries& a, const DatedSeries& b) {
    AlignedPairs out;
    std::vector<double> flat;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a.dates[i] < b.dates[j]) {
            ++i;
        } else if (b.dates[j] < a.dates[i]) {
            ++j;
        } else {
            out.dates.push_back(a.dates[i]);
            flat.push_back(a.values[i]);
            flat.push_back(b.values[j]);
            ++i;
            ++j;
        }
    }
    if (out.dates.empty()) throw data_error("the two series share no dates");
    out.values = Matrix(out.dates.size(), 2, std::move(flat));
    return out;
}

struct WindowConfig {
    std::size_t window = 200;
    std::size_t shift = 100;
    std::vector<double> alphas{2.0};
};

struct CmiRow {
    std::size_t window_index;
    std::size_t end_row;  // index of the last observation in the window
    double alpha;
    MeasureResult cmi;
};

inline std::size_t window_count(std::size_t n, const WindowConfig& w) {
    return n < w.window ? 0 : (n - w.window) / w.shift + 1;
}

/// Cumulative mutual information over sliding windows of rows of `pairs`
/// (any d >= 2). Each window is ranked with a tie-breaking stream seeded by
/// (seed, window index); alpha = 2 uses the exact rank formula and other
/// orders use quadrature of the empirical copula.
inline std::vector<CmiRow> sliding_cmi(const Matrix& pairs, const WindowConfig& w, const IntegrationSpec& q, std::uint64_t seed) {
    if (w.window < 10) throw domain_error("window must be at least 10");
    if (w.shift < 1 || w.shift > w.window) throw domain_error("shift must lie in [1, window]");
    if (w.alphas.empty()) throw domain_error("at least one alpha is required");
    const std::size_t n = pairs.rows(), d = pairs.cols();
    if (n < w.window) throw data_error("series has " + std::to_string(n) + " rows, fewer than the window " + std::to_string(w.window));
    std::vector<Alpha> alphas;
    for (double a : w.alphas) alphas.emplace_back(a);
    const std::size_t count = window_count(n, w);
    std::vector<std::vector<CmiRow>> per(count);
    parallel_for(count, [&](std::size_t k) {
        const std::size_t begin = k * w.shift;
        Matrix sub(w.window, d);
        for (std::size_t i = 0; i < w.window; ++i)
            for (std::size_t c = 0; c < d; ++c) sub(i, c) = pairs(begin + i, c);
        const RankMatrix r = ranks(sub, derive_seed(seed, {0x7173u, k}));
        const CopulaSpec emp = CopulaSpec::empirical(r);
        IntegrationSpec qq = q;
        qq.d = d;
        for (const Alpha& a : alphas) {
            MeasureResult m;
            if (a.value() == 2.0)
                m = {empirical_cmi2(r), 0.0, MeasureMethod::exact, 0};
            else
                m = cmi(emp, a, qq);
            per[k].push_back({k, begin + w.window - 1, a.value(), m});
        }
    });
    std::vector<CmiRow> out;
    for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
}

}  // namespace cumcop
