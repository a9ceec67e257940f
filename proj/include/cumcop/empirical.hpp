#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "alpha.hpp"
#include "copula.hpp"
#include "measures.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "rank_matrix.hpp"

namespace cumcop {

/// CCTE of the empirical copula, by quadrature.
inline MeasureResult empirical_ccte(const RankMatrix& r, Alpha a, const IntegrationSpec& q) {
    return ccte(CopulaSpec::empirical(r), a, q);
}

inline MeasureResult empirical_ccte(const RankMatrix& r, Alpha a) {
    return empirical_ccte(r, a, IntegrationSpec::defaults(r.d()));
}

/// Exact CCTE of the empirical copula. The copula is constant on the (n+1)^d
/// cells of width 1/(n+1), so the integral is a finite sum. Limited to
/// (n+1)^d <= max_cells.
inline MeasureResult empirical_ccte_cells(const RankMatrix& r, Alpha a, double max_cells = 2e7) {
    const std::size_t n = r.n(), d = r.d(), m = n + 1;
    if (std::pow(static_cast<double>(m), static_cast<double>(d)) > max_cells)
        throw domain_error("too many cells for the exact empirical CCTE");
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) total *= m;
    // counts[t] = number of observations with R <= t componentwise (t_k in 0..n)
    std::vector<std::uint32_t> counts(total, 0);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t idx = 0, stride = 1;
        for (std::size_t k = 0; k < d; ++k) {
            idx += r(j, k) * stride;
            stride *= m;
        }
        ++counts[idx];
    }
    std::size_t stride = 1;
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < total; ++i)
            if ((i / stride) % m != 0) counts[i] += counts[i - stride];
        stride *= m;
    }
    std::vector<double> h(n + 1);
    for (std::size_t c = 0; c <= n; ++c) h[c] = neg_r_log_alpha(static_cast<double>(c) / static_cast<double>(n), a);
    double s = 0.0;
    for (std::uint32_t c : counts) s += h[c];
    return {s / static_cast<double>(total), 0.0, MeasureMethod::exact, total};
}

/// (1/n) sum_j prod_k (1 - R_jk/(n+1)), the integral of the empirical copula.
inline double empirical_mean_r(const RankMatrix& r) {
    double s = 0.0;
    for (std::size_t j = 0; j < r.n(); ++j) {
        double p = 1.0;
        for (std::size_t k = 0; k < r.d(); ++k) p *= 1.0 - r.pseudo(j, k);
        s += p;
    }
    return s / static_cast<double>(r.n());
}

/// Jensen upper bound -R log_a(R) on the empirical CCTE, with R the integral
/// of the empirical copula.
inline double jensen_bound(const RankMatrix& r, Alpha a) { return neg_r_log_alpha(empirical_mean_r(r), a); }

namespace detail {

// sum_i sum_j prod_k T[max(R_ik, R_jk)], using symmetry; rows of the i loop
// are processed in fixed blocks and reduced in block order.
inline double pair_kernel_sum(const RankMatrix& r, const std::vector<double>& table) {
    const std::size_t n = r.n(), d = r.d();
    constexpr std::size_t block = 64;
    const std::size_t blocks = (n + block - 1) / block;
    std::vector<double> partial(blocks, 0.0);
    const auto& R = r.data();
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t end = std::min(n, (b + 1) * block);
        double s = 0.0;
        for (std::size_t i = b * block; i < end; ++i) {
            const std::uint32_t* ri = R.data() + i * d;
            double diag = 1.0;
            for (std::size_t k = 0; k < d; ++k) diag *= table[ri[k]];
            double off = 0.0;
            if (d == 2) {
                const std::uint32_t a0 = ri[0], a1 = ri[1];
                for (std::size_t j = i + 1; j < n; ++j) {
                    const std::uint32_t* rj = R.data() + j * 2;
                    off += table[std::max(a0, rj[0])] * table[std::max(a1, rj[1])];
                }
            } else {
                for (std::size_t j = i + 1; j < n; ++j) {
                    const std::uint32_t* rj = R.data() + j * d;
                    double p = 1.0;
                    for (std::size_t k = 0; k < d; ++k) p *= table[std::max(ri[k], rj[k])];
                    off += p;
                }
            }
            s += diag + 2.0 * off;
        }
        partial[b] = s;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace detail

/// Exact rank formula for the order-2 cumulative mutual information of the
/// empirical copula:
/// (1/n^2) sum_ij prod_k -log(max(R_ik,R_jk)/(n+1)) - (2/n) sum_i prod_k (1 - R_ik/(n+1)) + 2^-d.
inline double empirical_cmi2(const RankMatrix& r) {
    const std::size_t n = r.n(), d = r.d();
    const double m = static_cast<double>(n + 1), nn = static_cast<double>(n);
    std::vector<double> table(n + 1, 0.0);
    for (std::size_t t = 1; t <= n; ++t) table[t] = -std::log(static_cast<double>(t) / m);
    const double first = detail::pair_kernel_sum(r, table) / (nn * nn);
    return first - 2.0 * empirical_mean_r(r) + std::ldexp(1.0, -static_cast<int>(d));
}

}  // namespace cumcop
