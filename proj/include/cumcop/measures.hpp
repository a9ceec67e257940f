#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>

#include "alpha.hpp"
#include "copula.hpp"
#include "errors.hpp"
#include "quadrature.hpp"

namespace cumcop {

enum class MeasureMethod { closed_form, quadrature, exact };

inline std::string_view measure_method_name(MeasureMethod m) {
    switch (m) {
        case MeasureMethod::closed_form: return "closed_form";
        case MeasureMethod::quadrature: return "quadrature";
        case MeasureMethod::exact: return "exact";
    }
    return "?";
}

struct MeasureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    MeasureMethod method = MeasureMethod::quadrature;
    std::size_t points_used = 0;
};

namespace detail {

inline void require_cdf(const CopulaSpec& c) {
    if (!c.has_cdf())
        throw unsupported_error("the " + std::string(family_name(c.family())) + " copula has no CDF evaluator");
}

inline void require_same_d(const CopulaSpec& a, const CopulaSpec& b) {
    if (a.dimension() != b.dimension())
        throw dimension_error("copulas have dimensions " + std::to_string(a.dimension()) + " and " + std::to_string(b.dimension()));
}

inline IntegrationSpec spec_for(const CopulaSpec& c, const IntegrationSpec& q) {
    if (q.d != c.dimension())
        throw dimension_error("integration spec has d=" + std::to_string(q.d) + " but the copula has d=" + std::to_string(c.dimension()));
    return q;
}

template <class F>
MeasureResult integrate(F&& f, const IntegrationSpec& q, double scale = 1.0) {
    const IntegralEstimate e = integrate_unit_cube(std::forward<F>(f), q);
    return {scale * e.value, std::abs(scale) * e.error_estimate, MeasureMethod::quadrature, e.points_used};
}

// Numerators below this are treated as exact zeros (grounded corner regions).
inline constexpr double tiny = 1e-300;

// C1 log_a(C1/C2) - C1 + C2 with the conventions at C1 = 0 or C2 = 0.
inline double cctd_integrand(double c1, double c2, Alpha a) {
    if (c1 < tiny) return c2;
    if (c2 <= 0.0) {
        // log_a(inf) is finite only for a < 1: the limit is -1/(a-1).
        if (a.value() < 1.0) return c1 / (1.0 - a.value()) - c1;
        return std::numeric_limits<double>::infinity();
    }
    return c1 * log_alpha(c1 / c2, a) - c1 + c2;
}

}  // namespace detail

/// Cumulative copula Tsallis entropy -int C log_a(C); the Shannon limit gives
/// the cumulative copula entropy.
inline MeasureResult ccte(const CopulaSpec& c, Alpha a, const IntegrationSpec& q) {
    detail::require_cdf(c);
    return detail::integrate([&](const double* u) { return neg_r_log_alpha(c.cdf(u), a); }, detail::spec_for(c, q));
}

inline MeasureResult ccte(const CopulaSpec& c, Alpha a) { return ccte(c, a, IntegrationSpec::defaults(c.dimension())); }

/// int C(u) du over the unit cube.
inline MeasureResult copula_mean(const CopulaSpec& c, const IntegrationSpec& q) {
    detail::require_cdf(c);
    return detail::integrate([&](const double* u) { return c.cdf(u); }, detail::spec_for(c, q));
}

inline double spearman_cd(std::size_t d) {
    const double p = std::ldexp(1.0, static_cast<int>(d));
    return (static_cast<double>(d) + 1.0) / (p - static_cast<double>(d) - 1.0);
}

/// Multivariate Spearman rho c_d (2^d int C - 1).
inline MeasureResult spearman_rho(const CopulaSpec& c, const IntegrationSpec& q) {
    const std::size_t d = c.dimension();
    const double cd = spearman_cd(d), p = std::ldexp(1.0, static_cast<int>(d));
    MeasureResult m = copula_mean(c, q);
    m.value = cd * (p * m.value - 1.0);
    m.error_estimate *= cd * p;
    return m;
}

/// Inaccuracy -int C1 log_a(C2). Infinite (non_finite_integrand) when C2
/// vanishes where C1 does not and a <= 1.
inline MeasureResult ccti(const CopulaSpec& c1, const CopulaSpec& c2, Alpha a, const IntegrationSpec& q) {
    detail::require_same_d(c1, c2);
    detail::require_cdf(c1);
    detail::require_cdf(c2);
    return detail::integrate(
        [&](const double* u) {
            const double x = c1.cdf(u);
            if (x < detail::tiny) return 0.0;
            return -x * log_alpha(c2.cdf(u), a);
        },
        detail::spec_for(c1, q));
}

/// Tsallis divergence int [C1 log_a(C1/C2) - C1 + C2]. The Shannon limit is
/// the cumulative copula Kullback-Leibler divergence.
inline MeasureResult cctd(const CopulaSpec& c1, const CopulaSpec& c2, Alpha a, const IntegrationSpec& q) {
    detail::require_same_d(c1, c2);
    detail::require_cdf(c1);
    detail::require_cdf(c2);
    return detail::integrate([&](const double* u) { return detail::cctd_integrand(c1.cdf(u), c2.cdf(u), a); },
                             detail::spec_for(c1, q));
}

/// int (C1 - C2)^2 / C2.
inline MeasureResult chi2_divergence(const CopulaSpec& c1, const CopulaSpec& c2, const IntegrationSpec& q) {
    detail::require_same_d(c1, c2);
    detail::require_cdf(c1);
    detail::require_cdf(c2);
    return detail::integrate(
        [&](const double* u) {
            const double x = c1.cdf(u), y = c2.cdf(u);
            const double num = (x - y) * (x - y);
            if (num < detail::tiny) return 0.0;
            return num / y;
        },
        detail::spec_for(c1, q));
}

/// Cumulative mutual information of order a: the divergence from independence.
inline MeasureResult cmi(const CopulaSpec& c, Alpha a, const IntegrationSpec& q) {
    return cctd(c, CopulaSpec::product(c.dimension()), a, q);
}

}  // namespace cumcop
