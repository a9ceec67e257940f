#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "random.hpp"

namespace cumcop {

/// n x d integer ranks; every column is a permutation of 1..n.
class RankMatrix {
public:
    RankMatrix(std::size_t n, std::size_t d, std::vector<std::uint32_t> ranks) : n_(n), d_(d), r_(std::move(ranks)) {
        validate();
    }

    RankMatrix(std::initializer_list<std::initializer_list<std::uint32_t>> rows) {
        n_ = rows.size();
        d_ = n_ ? rows.begin()->size() : 0;
        for (const auto& row : rows) {
            if (row.size() != d_) throw dimension_error("ragged rank matrix");
            r_.insert(r_.end(), row.begin(), row.end());
        }
        validate();
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t d() const noexcept { return d_; }
    std::uint32_t operator()(std::size_t j, std::size_t k) const noexcept { return r_[j * d_ + k]; }
    std::span<const std::uint32_t> row(std::size_t j) const noexcept { return {r_.data() + j * d_, d_}; }
    const std::vector<std::uint32_t>& data() const noexcept { return r_; }

    /// R/(n+1), the pseudo-observation of entry (j, k).
    double pseudo(std::size_t j, std::size_t k) const noexcept {
        return static_cast<double>((*this)(j, k)) / static_cast<double>(n_ + 1);
    }

    /// Copy with rows reordered by `order` (a permutation of 0..n-1).
    RankMatrix permuted_rows(std::span<const std::size_t> order) const {
        std::vector<std::uint32_t> out;
        out.reserve(r_.size());
        for (std::size_t j : order) {
            auto rw = row(j);
            out.insert(out.end(), rw.begin(), rw.end());
        }
        return RankMatrix(n_, d_, std::move(out));
    }

    friend bool operator==(const RankMatrix&, const RankMatrix&) = default;

private:
    void validate() const {
        if (n_ == 0) throw data_error("rank matrix needs at least one row");
        if (d_ < 2) throw dimension_error("rank matrix needs at least two columns");
        if (r_.size() != n_ * d_) throw dimension_error("rank data size does not match shape");
        std::vector<char> seen(n_ + 1);
        for (std::size_t k = 0; k < d_; ++k) {
            std::fill(seen.begin(), seen.end(), 0);
            for (std::size_t j = 0; j < n_; ++j) {
                const auto v = r_[j * d_ + k];
                if (v < 1 || v > n_ || seen[v])
                    throw data_error("column " + std::to_string(k) + " is not a permutation of 1..n");
                seen[v] = 1;
            }
        }
    }

    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<std::uint32_t> r_;
};

/// Column-wise ranks. Tied entries receive their ranks in an order drawn from
/// a stream seeded by (seed, column), so the result is a permutation and is
/// reproducible.
inline RankMatrix ranks(const Matrix& data, std::uint64_t seed) {
    const std::size_t n = data.rows(), d = data.cols();
    if (n == 0) throw data_error("cannot rank an empty sample");
    if (d < 2) throw dimension_error("ranking needs at least two columns");
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < d; ++k)
            if (!std::isfinite(data(j, k)))
                throw data_error("non-finite observation at row " + std::to_string(j) + ", column " + std::to_string(k));

    std::vector<std::uint32_t> out(n * d);
    std::vector<std::size_t> idx(n);
    for (std::size_t k = 0; k < d; ++k) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return data(a, k) < data(b, k); });
        Engine g = make_engine(derive_seed(seed, {0x7135u, k}));
        for (std::size_t s = 0; s < n;) {
            std::size_t e = s + 1;
            while (e < n && data(idx[e], k) == data(idx[s], k)) ++e;
            if (e - s > 1) portable_shuffle(idx.begin() + static_cast<std::ptrdiff_t>(s), idx.begin() + static_cast<std::ptrdiff_t>(e), g);
            s = e;
        }
        for (std::size_t pos = 0; pos < n; ++pos) out[idx[pos] * d + k] = static_cast<std::uint32_t>(pos + 1);
    }
    return RankMatrix(n, d, std::move(out));
}

/// Number of ranks t in 1..n with t/(n+1) <= u, computed with the same double
/// comparison used by the direct formula.
inline std::size_t rank_threshold(double u, std::size_t n) {
    const double m = static_cast<double>(n + 1);
    if (!(u > 0.0)) return 0;
    if (u >= 1.0) return n;
    auto t = static_cast<std::size_t>(std::min(std::floor(u * m), static_cast<double>(n)));
    while (t < n && static_cast<double>(t + 1) / m <= u) ++t;
    while (t > 0 && static_cast<double>(t) / m > u) --t;
    return t;
}

/// Empirical copula (1/n) sum_j prod_k 1{R_jk/(n+1) <= u_k}, evaluated directly.
inline double ecop_eval(const RankMatrix& r, std::span<const double> u) {
    if (u.size() != r.d()) throw dimension_error("point dimension does not match rank matrix");
    std::vector<std::size_t> t(r.d());
    for (std::size_t k = 0; k < r.d(); ++k) t[k] = rank_threshold(u[k], r.n());
    std::size_t count = 0;
    for (std::size_t j = 0; j < r.n(); ++j) {
        bool in = true;
        for (std::size_t k = 0; k < r.d() && in; ++k) in = r(j, k) <= t[k];
        count += in;
    }
    return static_cast<double>(count) / static_cast<double>(r.n());
}

/// Precomputed prefix bitsets for fast repeated evaluation of the empirical
/// copula: bit j of prefix(k, t) is set when R_jk <= t. Evaluation is an AND
/// across coordinates and a popcount. Falls back to the direct sum when the
/// tables would exceed `max_bytes`.
class EmpiricalIndex {
public:
    explicit EmpiricalIndex(RankMatrix r, std::size_t max_bytes = std::size_t{1} << 29) : r_(std::move(r)) {
        const std::size_t n = r_.n(), d = r_.d();
        words_ = (n + 63) / 64;
        const double bytes = static_cast<double>(d) * static_cast<double>(n + 1) * static_cast<double>(words_) * 8.0;
        if (bytes > static_cast<double>(max_bytes)) return;
        bits_.assign(d * (n + 1) * words_, 0);
        std::vector<std::size_t> who(n + 1);
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t j = 0; j < n; ++j) who[r_(j, k)] = j;
            for (std::size_t t = 1; t <= n; ++t) {
                std::uint64_t* cur = prefix(k, t);
                const std::uint64_t* prev = prefix(k, t - 1);
                std::copy(prev, prev + words_, cur);
                cur[who[t] / 64] |= std::uint64_t{1} << (who[t] % 64);
            }
        }
    }

    const RankMatrix& ranks() const noexcept { return r_; }
    bool indexed() const noexcept { return !bits_.empty(); }

    double operator()(const double* u) const {
        const std::size_t n = r_.n(), d = r_.d();
        if (!indexed()) return ecop_eval(r_, {u, d});
        std::size_t t[16];
        std::vector<std::size_t> heap;
        std::size_t* tt = t;
        if (d > 16) {
            heap.resize(d);
            tt = heap.data();
        }
        for (std::size_t k = 0; k < d; ++k) {
            tt[k] = rank_threshold(u[k], n);
            if (tt[k] == 0) return 0.0;
        }
        std::size_t count = 0;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t x = prefix(0, tt[0])[w];
            for (std::size_t k = 1; k < d && x; ++k) x &= prefix(k, tt[k])[w];
            count += static_cast<std::size_t>(std::popcount(x));
        }
        return static_cast<double>(count) / static_cast<double>(n);
    }

private:
    std::uint64_t* prefix(std::size_t k, std::size_t t) { return bits_.data() + (k * (r_.n() + 1) + t) * words_; }
    const std::uint64_t* prefix(std::size_t k, std::size_t t) const {
        return bits_.data() + (k * (r_.n() + 1) + t) * words_;
    }

    RankMatrix r_;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

}  // namespace cumcop
