#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "copula.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace cumcop {

namespace detail {

inline double std_normal(Engine& g) {
    // Box-Muller, one variate per call so the stream layout stays simple.
    const double u1 = open_uniform(g), u2 = open_uniform(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Marsaglia-Tsang gamma(shape, 1).
inline double gamma_draw(Engine& g, double shape) {
    if (shape < 1.0) return gamma_draw(g, shape + 1.0) * std::pow(open_uniform(g), 1.0 / shape);
    const double d = shape - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = std_normal(g);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = open_uniform(g);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// Positive stable variable with Laplace transform exp(-t^a), 0 < a < 1
// (Kanter's representation).
inline double positive_stable(Engine& g, double a) {
    const double u = std::numbers::pi * open_uniform(g);
    const double e = std_exponential(g);
    const double A = std::pow(std::sin(a * u), a / (1.0 - a)) * std::sin((1.0 - a) * u) /
                     std::pow(std::sin(u), 1.0 / (1.0 - a));
    return std::pow(A / e, (1.0 - a) / a);
}

// Logarithmic series on {1,2,...} with P(k) proportional to p^k / k, where
// log(1-p) = log1mp (Kemp's algorithm).
inline double log_series(Engine& g, double log1mp) {
    const double p = -std::expm1(log1mp);
    const double v = open_uniform(g);
    if (v >= p) return 1.0;
    const double q = -std::expm1(log1mp * open_uniform(g));
    if (v <= q * q) {
        const double k = std::floor(1.0 + std::log(v) / std::log(q));
        return std::isfinite(k) ? std::max(k, 1.0) : 1.0;
    }
    return v <= q ? 2.0 : 1.0;
}

// One row of a draw from the copula into out[0..d).
inline void sample_row(const CopulaSpec& c, Engine& g, double* out) {
    const std::size_t d = c.dimension();
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, fam::Product>) {
                for (std::size_t k = 0; k < d; ++k) out[k] = open_uniform(g);
            } else if constexpr (std::is_same_v<T, fam::FrechetUpper>) {
                const double u = open_uniform(g);
                for (std::size_t k = 0; k < d; ++k) out[k] = u;
            } else if constexpr (std::is_same_v<T, fam::FrechetLower>) {
                const double u = open_uniform(g);
                out[0] = u;
                out[1] = 1.0 - u;
            } else if constexpr (std::is_same_v<T, fam::Clayton>) {
                const double th = f.theta;
                if (th > 0.0) {
                    const double v = gamma_draw(g, 1.0 / th);
                    for (std::size_t k = 0; k < d; ++k) out[k] = std::pow(1.0 + std_exponential(g) / v, -1.0 / th);
                } else if (th == -1.0) {
                    const double u = open_uniform(g);
                    out[0] = u;
                    out[1] = 1.0 - u;
                } else {
                    // conditional inversion of C(v | u)
                    const double u = open_uniform(g), w = open_uniform(g);
                    out[0] = u;
                    out[1] = std::pow(std::pow(u, -th) * (std::pow(w, -th / (1.0 + th)) - 1.0) + 1.0, -1.0 / th);
                }
            } else if constexpr (std::is_same_v<T, fam::Gumbel>) {
                if (f.theta == 1.0) {
                    for (std::size_t k = 0; k < d; ++k) out[k] = open_uniform(g);
                } else {
                    const double a = 1.0 / f.theta;
                    const double s = positive_stable(g, a);
                    for (std::size_t k = 0; k < d; ++k) out[k] = std::exp(-std::pow(std_exponential(g) / s, a));
                }
            } else if constexpr (std::is_same_v<T, fam::Frank>) {
                const double th = f.theta;
                if (th > 0.0) {
                    const double v = log_series(g, -th);
                    const double one_minus = -std::expm1(-th);
                    for (std::size_t k = 0; k < d; ++k) {
                        const double t = std_exponential(g) / v;
                        out[k] = -std::log1p(-one_minus * std::exp(-t)) / th;
                    }
                } else {
                    const double u = open_uniform(g), w = open_uniform(g);
                    out[0] = u;
                    out[1] = -std::log1p(w * std::expm1(-th) / (w + (1.0 - w) * std::exp(-th * u))) / th;
                }
            } else if constexpr (std::is_same_v<T, fam::FGM>) {
                const double u = open_uniform(g), w = open_uniform(g);
                const double a = f.theta * (1.0 - 2.0 * u);
                out[0] = u;
                out[1] = 2.0 * w / ((1.0 + a) + std::sqrt((1.0 + a) * (1.0 + a) - 4.0 * a * w));
            } else if constexpr (std::is_same_v<T, fam::Gaussian>) {
                const double z1 = std_normal(g);
                const double z2 = f.rho * z1 + std::sqrt(1.0 - f.rho * f.rho) * std_normal(g);
                out[0] = normal_cdf(z1);
                out[1] = normal_cdf(z2);
            } else if constexpr (std::is_same_v<T, fam::StudentT>) {
                const double z1 = std_normal(g);
                const double z2 = f.rho * z1 + std::sqrt(1.0 - f.rho * f.rho) * std_normal(g);
                const double w = std::sqrt(2.0 * gamma_draw(g, 0.5 * f.nu) / f.nu);
                const boost::math::students_t_distribution<double> t(f.nu);
                out[0] = boost::math::cdf(t, z1 / w);
                out[1] = boost::math::cdf(t, z2 / w);
            } else if constexpr (std::is_same_v<T, fam::WAM>) {
                double pick = open_uniform(g), acc = 0.0;
                std::size_t j = 0;
                for (; j + 1 < f.weights.size(); ++j) {
                    acc += f.weights[j];
                    if (pick < acc) break;
                }
                sample_row((*f.children)[j], g, out);
            } else {
                throw unsupported_error(std::string("no sampler for the ") + std::string(family_name(c.family())) + " copula");
            }
        },
        c.variant());
}

inline bool has_sampler(const CopulaSpec& c) {
    switch (c.family()) {
        case Family::product:
        case Family::frechet_upper:
        case Family::frechet_lower:
        case Family::clayton:
        case Family::gumbel:
        case Family::frank:
        case Family::fgm:
        case Family::gaussian:
        case Family::student_t:
            return true;
        case Family::wam: {
            const auto& w = std::get<fam::WAM>(c.variant());
            return std::all_of(w.children->begin(), w.children->end(), [](const CopulaSpec& x) { return has_sampler(x); });
        }
        default:
            return false;
    }
}

}  // namespace detail

inline bool has_sampler(const CopulaSpec& c) { return detail::has_sampler(c); }

/// n i.i.d. draws from the copula, one per row. Rows are generated in blocks of
/// 1024 with per-block streams, so the output depends only on the seed.
inline Matrix sample(const CopulaSpec& c, std::size_t n, std::uint64_t seed) {
    if (!has_sampler(c))
        throw unsupported_error(std::string("no sampler for the ") + std::string(family_name(c.family())) + " copula");
    const std::size_t d = c.dimension();
    Matrix out(n, d);
    constexpr std::size_t block = 1024;
    const std::size_t blocks = (n + block - 1) / block;
    parallel_for(blocks, [&](std::size_t b) {
        Engine g = make_engine(derive_seed(seed, {0x5a3b1eu, b}));
        const std::size_t end = std::min(n, (b + 1) * block);
        for (std::size_t i = b * block; i < end; ++i) detail::sample_row(c, g, &out(i, 0));
    });
    return out;
}

}  // namespace cumcop
