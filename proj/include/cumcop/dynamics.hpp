#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "alpha.hpp"
#include "empirical.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "rank_matrix.hpp"

namespace cumcop {

/// Two identical Rulkov maps with diffusive coupling gamma. beta = 1.5 is the
/// default because with beta = 0 the map delta/(1+x^2) is monotone on its
/// invariant interval and never leaves period 1 or 2.
struct RulkovParams {
    double delta = -2.8;
    double beta = 1.5;
    double gamma = 0.05;
    double x0 = 0.1;
    double y0 = 0.5;
    std::size_t n = 2000;
    std::size_t burn_in = 1000;
};

inline const std::vector<double>& default_rulkov_deltas() {
    static const std::vector<double> d{-1.8, -2.2, -2.6, -2.8, -3.0};
    return d;
}

inline void validate(const RulkovParams& p) {
    if (p.n < 1) throw domain_error("Rulkov trajectory needs n >= 1");
    if (p.burn_in >= p.n) throw domain_error("burn-in must be smaller than n");
    for (double v : {p.delta, p.beta, p.gamma, p.x0, p.y0})
        if (!std::isfinite(v)) throw domain_error("Rulkov parameters must be finite");
}

/// n states (x_i, y_i), starting with (x0, y0):
/// x' = delta/(1+x^2) + beta + gamma (y - x), y' = delta/(1+y^2) + beta + gamma (x - y).
inline Matrix simulate_rulkov(const RulkovParams& p) {
    validate(p);
    Matrix out(p.n, 2);
    double x = p.x0, y = p.y0;
    for (std::size_t i = 0; i < p.n; ++i) {
        if (!std::isfinite(x) || !std::isfinite(y))
            throw domain_error("Rulkov state became non-finite at step " + std::to_string(i));
        out(i, 0) = x;
        out(i, 1) = y;
        const double nx = p.delta / (1.0 + x * x) + p.beta + p.gamma * (y - x);
        const double ny = p.delta / (1.0 + y * y) + p.beta + p.gamma * (x - y);
        x = nx;
        y = ny;
    }
    return out;
}

enum class Regime { period1, periodic, chaotic };

inline std::string_view regime_name(Regime r) {
    switch (r) {
        case Regime::period1: return "period-1";
        case Regime::periodic: return "periodic";
        case Regime::chaotic: return "chaotic";
    }
    return "?";
}

/// More than this many distinct post-burn-in values counts as chaos.
inline constexpr std::size_t chaos_threshold = 50;

inline Regime classify(std::size_t distinct) {
    if (distinct <= 1) return Regime::period1;
    return distinct > chaos_threshold ? Regime::chaotic : Regime::periodic;
}

struct BifurcationRow {
    double delta;
    std::vector<double> values;  // distinct post-burn-in x values, ascending
    Regime regime;
};

/// Sorted values with neighbours closer than `tol` merged (first of each run kept).
inline std::vector<double> dedupe(std::vector<double> v, double tol = 1e-6) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    return out;
}

inline std::vector<BifurcationRow> bifurcation_scan(const std::vector<double>& deltas, RulkovParams p) {
    if (deltas.empty()) throw domain_error("bifurcation scan needs at least one delta");
    validate(p);
    std::vector<BifurcationRow> rows(deltas.size());
    parallel_for(deltas.size(), [&](std::size_t i) {
        RulkovParams q = p;
        q.delta = deltas[i];
        const Matrix t = simulate_rulkov(q);
        std::vector<double> xs;
        for (std::size_t s = q.burn_in; s < q.n; ++s) xs.push_back(t(s, 0));
        auto vals = dedupe(std::move(xs));
        const Regime reg = classify(vals.size());
        rows[i] = {deltas[i], std::move(vals), reg};
    });
    return rows;
}

struct RulkovCcteRow {
    double delta;
    std::size_t distinct;
    Regime regime;
    MeasureResult ccte;
};

/// Per delta: empirical CCTE of the ranked (x, y) trajectory. Ties (periodic
/// orbits) are broken with a stream seeded by (seed, delta).
inline std::vector<RulkovCcteRow> rulkov_ccte(const std::vector<double>& deltas, Alpha a, RulkovParams p,
                                              const IntegrationSpec& q, std::uint64_t seed) {
    const auto bif = bifurcation_scan(deltas, p);
    std::vector<RulkovCcteRow> rows;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        RulkovParams s = p;
        s.delta = deltas[i];
        const Matrix t = simulate_rulkov(s);
        const RankMatrix r = ranks(t, derive_seed(seed, {0x21u, std::bit_cast<std::uint64_t>(deltas[i])}));
        rows.push_back({deltas[i], bif[i].values.size(), bif[i].regime, empirical_ccte(r, a, q)});
    }
    return rows;
}

}  // namespace cumcop
