#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "copula.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "parallel.hpp"

namespace cumcop {

struct TauSpec {
    Family family;
    double tau;
    double nu = 4.0;  // Student-t only
};

/// Result of calibrating a family to a Kendall tau. `parameter` is empty when
/// the independence limit (tau = 0) was taken and `spec` is the product copula.
struct TauConversion {
    CopulaSpec spec;
    std::optional<double> parameter;
    std::string warning;
};

/// First Debye function D1(x) = (1/x) int_0^x t/(e^t - 1) dt, any real x.
inline double debye1(double x) {
    if (x == 0.0) return 1.0;
    const double ax = std::abs(x);
    auto f = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, ax, 15, 1e-14);
    const double d = integral / ax;
    return x > 0.0 ? d : d + ax / 2.0;
}

/// Kendall tau of the bivariate Frank copula.
inline double frank_tau(double theta) {
    if (theta == 0.0) return 0.0;
    // 1 - debye1 cancels near 0; the series is exact to rounding there.
    if (std::abs(theta) < 1e-2) {
        const double t2 = theta * theta;
        return theta * (1.0 / 9.0 - t2 / 900.0 + t2 * t2 / 52920.0);
    }
    return 1.0 - 4.0 / theta * (1.0 - debye1(theta));
}

namespace detail {

inline double solve_frank(double tau) {
    double lo = -50.0, hi = 50.0;
    if (tau <= frank_tau(lo) || tau >= frank_tau(hi))
        throw domain_error("Kendall tau " + std::to_string(tau) + " outside the Frank range reachable with |theta| <= 50");
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        const double t = mid == 0.0 ? 0.0 : frank_tau(mid);
        (t < tau ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Family parameter matching a target Kendall tau (bivariate relations).
/// tau = 0 maps to the product copula for every family.
inline TauConversion tau_to_param(const TauSpec& t, std::size_t d = 2) {
    const double tau = t.tau;
    if (!(tau > -1.0 && tau < 1.0)) throw domain_error("Kendall tau must lie in (-1, 1)");
    if (tau == 0.0) return {CopulaSpec::product(d), std::nullopt, ""};
    switch (t.family) {
        case Family::product:
            throw domain_error("the product copula only has tau = 0");
        case Family::clayton: {
            const double th = 2.0 * tau / (1.0 - tau);
            return {CopulaSpec::clayton(th, d), th, ""};
        }
        case Family::gumbel: {
            if (tau < 0.0) throw domain_error("Gumbel-Hougaard supports only tau >= 0");
            const double th = 1.0 / (1.0 - tau);
            return {CopulaSpec::gumbel(th, d), th, ""};
        }
        case Family::frank: {
            const double th = detail::solve_frank(tau);
            return {CopulaSpec::frank(th, d), th, ""};
        }
        case Family::gaussian: {
            if (d != 2) throw dimension_error("Gaussian copula is bivariate here");
            const double rho = std::sin(std::numbers::pi * tau / 2.0);
            return {CopulaSpec::gaussian(rho), rho, ""};
        }
        case Family::student_t: {
            if (d != 2) throw dimension_error("Student-t copula is bivariate here");
            const double rho = std::sin(std::numbers::pi * tau / 2.0);
            return {CopulaSpec::student_t(rho, t.nu), rho, ""};
        }
        case Family::fgm: {
            if (d != 2) throw dimension_error("FGM copula is bivariate");
            double th = 4.5 * tau;
            std::string warn;
            if (std::abs(th) > 1.0) {
                warn = "FGM attains |tau| <= 2/9 only; theta clamped from " + std::to_string(th) + " to " +
                       std::to_string(std::clamp(th, -1.0, 1.0));
                th = std::clamp(th, -1.0, 1.0);
            }
            return {CopulaSpec::fgm(th), th, warn};
        }
        default:
            throw domain_error("no Kendall tau calibration for the " + std::string(family_name(t.family)) + " copula");
    }
}

/// Sample Kendall tau-b of two columns, O(n^2).
inline double kendall_tau(const Matrix& x, std::size_t a = 0, std::size_t b = 1) {
    const std::size_t n = x.rows();
    if (n < 2) throw data_error("Kendall tau needs at least two rows");
    if (a >= x.cols() || b >= x.cols()) throw dimension_error("column index out of range");
    constexpr std::size_t block = 256;
    const std::size_t blocks = (n + block - 1) / block;
    std::vector<double> conc(blocks), tie_a(blocks), tie_b(blocks);
    parallel_for(blocks, [&](std::size_t blk) {
        double s = 0.0, ta = 0.0, tb = 0.0;
        const std::size_t end = std::min(n, (blk + 1) * block);
        for (std::size_t i = blk * block; i < end; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double da = x(i, a) - x(j, a), db = x(i, b) - x(j, b);
                if (da == 0.0) ta += 1.0;
                if (db == 0.0) tb += 1.0;
                s += static_cast<double>(((da > 0) - (da < 0)) * ((db > 0) - (db < 0)));
            }
        conc[blk] = s;
        tie_a[blk] = ta;
        tie_b[blk] = tb;
    });
    double s = 0.0, ta = 0.0, tb = 0.0;
    for (std::size_t i = 0; i < blocks; ++i) {
        s += conc[i];
        ta += tie_a[i];
        tb += tie_b[i];
    }
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const double den = std::sqrt((pairs - ta) * (pairs - tb));
    return den > 0.0 ? s / den : 0.0;
}

}  // namespace cumcop
