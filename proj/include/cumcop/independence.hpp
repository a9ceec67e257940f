#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dependence.hpp"
#include "empirical.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "rank_matrix.hpp"
#include "sampling.hpp"

namespace cumcop {

enum class Statistic { chi2_div, cvm, ks };

inline std::string_view statistic_name(Statistic s) {
    switch (s) {
        case Statistic::chi2_div: return "chi2_div";
        case Statistic::cvm: return "cvm";
        case Statistic::ks: return "ks";
    }
    return "?";
}

inline Statistic parse_statistic(std::string_view s) {
    if (s == "chi2" || s == "chi2_div" || s == "chi2-div") return Statistic::chi2_div;
    if (s == "cvm") return Statistic::cvm;
    if (s == "ks") return Statistic::ks;
    throw domain_error("unknown statistic '" + std::string(s) + "' (expected chi2, cvm or ks)");
}

inline void require_two_rows(const RankMatrix& r) {
    if (r.n() < 2) throw data_error("the statistic needs n >= 2");
}

/// chi^2 divergence statistic n * mu_2(C_n).
inline double chi2_div_stat(const RankMatrix& r) {
    require_two_rows(r);
    return static_cast<double>(r.n()) * empirical_cmi2(r);
}

/// Cramer-von Mises statistic n int (C_n - Pi)^2 in closed rank form.
inline double cvm_stat(const RankMatrix& r) {
    require_two_rows(r);
    const std::size_t n = r.n(), d = r.d();
    const double m = static_cast<double>(n + 1), nn = static_cast<double>(n);
    std::vector<double> table(n + 1, 0.0);
    for (std::size_t t = 1; t <= n; ++t) table[t] = 1.0 - static_cast<double>(t) / m;
    double second = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double u = r.pseudo(i, k);
            p *= 1.0 - u * u;
        }
        second += p;
    }
    const double three_d = std::pow(3.0, static_cast<double>(d));
    return nn / three_d - second / std::ldexp(1.0, static_cast<int>(d) - 1) + detail::pair_kernel_sum(r, table) / nn;
}

namespace detail {

inline double ks_bivariate(const RankMatrix& r) {
    const std::size_t n = r.n();
    std::vector<std::uint32_t> second_at(n + 1);
    for (std::size_t j = 0; j < n; ++j) second_at[r(j, 0)] = r(j, 1);
    std::vector<std::uint32_t> cnt(n + 1, 0);
    const double m = static_cast<double>(n + 1), nn = static_cast<double>(n);
    double best = 0.0;
    for (std::size_t t1 = 1; t1 <= n; ++t1) {
        for (std::size_t t2 = second_at[t1]; t2 <= n; ++t2) ++cnt[t2];
        const double u1 = static_cast<double>(t1) / m;
        for (std::size_t t2 = 1; t2 <= n; ++t2) {
            const double diff = std::abs(static_cast<double>(cnt[t2]) / nn - u1 * (static_cast<double>(t2) / m));
            best = std::max(best, diff);
        }
    }
    return best;
}

inline double ks_lattice(const RankMatrix& r) {
    const std::size_t n = r.n(), d = r.d(), m = n;
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) total *= m;
    std::vector<std::uint32_t> counts(total, 0);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t idx = 0, stride = 1;
        for (std::size_t k = 0; k < d; ++k) {
            idx += (r(j, k) - 1) * stride;
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
    const double mm = static_cast<double>(n + 1), nn = static_cast<double>(n);
    double best = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        double p = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            p *= static_cast<double>(rem % m + 1) / mm;
            rem /= m;
        }
        best = std::max(best, std::abs(static_cast<double>(counts[i]) / nn - p));
    }
    return best;
}

// Observed rank tuples plus coordinate-wise meets of pairs of them.
inline double ks_meets(const RankMatrix& r, std::size_t max_pairs) {
    const std::size_t n = r.n(), d = r.d();
    const EmpiricalIndex idx(r);
    const double mm = static_cast<double>(n + 1);
    auto eval = [&](const std::uint32_t* t) {
        double u[64];
        std::vector<double> heap;
        double* uu = u;
        if (d > 64) {
            heap.resize(d);
            uu = heap.data();
        }
        double p = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            uu[k] = static_cast<double>(t[k]) / mm;
            p *= uu[k];
        }
        return std::abs(idx(uu) - p);
    };
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const std::size_t step = pairs > static_cast<double>(max_pairs)
                                 ? static_cast<std::size_t>(std::ceil(pairs / static_cast<double>(max_pairs)))
                                 : 1;
    std::vector<double> partial(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        std::vector<std::uint32_t> t(d);
        double best = eval(&r.data()[i * d]);
        // pair (i, j) is visited when its linear index is a multiple of step
        const std::size_t base = i * n - i * (i + 1) / 2;
        for (std::size_t j = i + 1; j < n; ++j) {
            if ((base + j - i - 1) % step != 0) continue;
            for (std::size_t k = 0; k < d; ++k) t[k] = std::min(r(i, k), r(j, k));
            best = std::max(best, eval(t.data()));
        }
        partial[i] = best;
    });
    return *std::max_element(partial.begin(), partial.end());
}

}  // namespace detail

/// Cap on lattice size for the exact KS maximum in d >= 3.
inline constexpr double ks_lattice_cap = 1e7;

/// sqrt(n) max |C_n - Pi| over the lattice {i/(n+1)}^d. For d >= 3 and
/// n^d above the cap, the maximum is taken over observed rank tuples and
/// their pairwise coordinate-wise minima instead.
inline double ks_stat(const RankMatrix& r) {
    require_two_rows(r);
    const std::size_t n = r.n(), d = r.d();
    double sup;
    if (d == 2)
        sup = detail::ks_bivariate(r);
    else if (std::pow(static_cast<double>(n), static_cast<double>(d)) <= ks_lattice_cap)
        sup = detail::ks_lattice(r);
    else
        sup = detail::ks_meets(r, 10'000'000);
    return std::sqrt(static_cast<double>(n)) * sup;
}

inline double compute_statistic(Statistic s, const RankMatrix& r) {
    switch (s) {
        case Statistic::chi2_div: return chi2_div_stat(r);
        case Statistic::cvm: return cvm_stat(r);
        case Statistic::ks: return ks_stat(r);
    }
    throw domain_error("unknown statistic");
}

/// Rank matrix of n i.i.d. uniform rows, replicate b of the null stream.
inline RankMatrix null_replicate(std::size_t n, std::size_t d, std::uint64_t seed, std::uint64_t b) {
    Engine g = make_engine(derive_seed(seed, {0x4e55u, b}));
    Matrix u(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) u(i, k) = open_uniform(g);
    return ranks(u, derive_seed(seed, {0x4e56u, b}));
}

/// Bootstrap null distribution of a statistic for sample size n in dimension
/// d. All three statistics are rank-based, so the table depends only on
/// (n, d, B, seed) and can be reused for any data set of that shape.
struct NullTable {
    Statistic stat;
    std::size_t n, d, B;
    std::uint64_t seed;
    std::vector<double> values;  // in replicate order
    std::vector<double> sorted;

    /// (1/B) #{replicates >= observed}.
    double p_value(double observed) const {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), observed);
        return static_cast<double>(sorted.end() - it) / static_cast<double>(B);
    }
};

/// Null tables for several statistics computed on a shared replicate set.
inline std::vector<NullTable> build_null_tables(const std::vector<Statistic>& stats, std::size_t n, std::size_t d,
                                                std::size_t B, std::uint64_t seed) {
    if (B == 0) throw domain_error("bootstrap needs B >= 1");
    std::vector<std::vector<double>> vals(stats.size(), std::vector<double>(B));
    parallel_for(B, [&](std::size_t b) {
        const RankMatrix r = null_replicate(n, d, seed, b);
        for (std::size_t s = 0; s < stats.size(); ++s) vals[s][b] = compute_statistic(stats[s], r);
    });
    std::vector<NullTable> out;
    for (std::size_t s = 0; s < stats.size(); ++s) {
        NullTable t{stats[s], n, d, B, seed, vals[s], vals[s]};
        std::sort(t.sorted.begin(), t.sorted.end());
        out.push_back(std::move(t));
    }
    return out;
}

inline NullTable build_null_table(Statistic s, std::size_t n, std::size_t d, std::size_t B, std::uint64_t seed) {
    return std::move(build_null_tables({s}, n, d, B, seed).front());
}

struct TestReport {
    Statistic statistic;
    double observed;
    std::size_t B;
    double p_value;
    std::uint64_t seed;
    std::size_t n, d;
};

/// Bootstrap test of mutual independence: B rank matrices of i.i.d. uniform
/// samples, the statistic on each, and p = (1/B) #{replicate >= observed}.
inline TestReport bootstrap_pvalue(Statistic s, const RankMatrix& r, std::size_t B, std::uint64_t seed) {
    if (B < 100) throw domain_error("bootstrap needs B >= 100");
    const double obs = compute_statistic(s, r);
    const NullTable t = build_null_table(s, r.n(), r.d(), B, seed);
    return {s, obs, B, t.p_value(obs), seed, r.n(), r.d()};
}

struct PowerConfig {
    std::vector<Family> families;
    std::vector<double> taus;
    std::vector<std::size_t> ns;
    std::vector<Statistic> stats{Statistic::chi2_div, Statistic::cvm, Statistic::ks};
    std::size_t replications = 1000;
    // One table serves every replication, so the error in its critical value
    // is shared by all of them and does not average out. Raise B for power
    // estimates; the table is built once, so that is cheap.
    std::size_t B = 500;
    double level = 0.05;
    std::uint64_t seed = 0;
    double nu = 4.0;
};

struct PowerRow {
    Family family;
    double tau;
    std::size_t n;
    Statistic stat;
    double power;
    std::size_t rejections;
    std::size_t replications;
    std::string warning;
};

inline void validate(const PowerConfig& cfg) {
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw domain_error("level must lie in (0, 1)");
    if (cfg.families.empty() || cfg.taus.empty() || cfg.ns.empty() || cfg.stats.empty())
        throw domain_error("power config needs families, taus, sample sizes and statistics");
    if (cfg.replications == 0) throw domain_error("power config needs replications >= 1");
    if (cfg.B < 100) throw domain_error("power config needs B >= 100");
    for (std::size_t n : cfg.ns)
        if (n < 2) throw domain_error("sample sizes must be >= 2");
    for (Family f : cfg.families)
        for (double tau : cfg.taus) (void)tau_to_param({f, tau, cfg.nu});
}

/// Rejection rates over the (family, tau, n, statistic) grid. Null tables are
/// built once per n and shared across families and taus.
inline std::vector<PowerRow> power_study(const PowerConfig& cfg) {
    validate(cfg);
    std::vector<PowerRow> rows;
    for (std::size_t n : cfg.ns) {
        const auto tables = build_null_tables(cfg.stats, n, 2, cfg.B, derive_seed(cfg.seed, {0x9001u, n}));
        for (Family f : cfg.families) {
            for (double tau : cfg.taus) {
                const TauConversion conv = tau_to_param({f, tau, cfg.nu});
                const std::uint64_t cell = derive_seed(cfg.seed, {0x9002u, static_cast<std::uint64_t>(f),
                                                                   std::bit_cast<std::uint64_t>(tau), n});
                std::vector<std::vector<char>> reject(cfg.stats.size(), std::vector<char>(cfg.replications, 0));
                parallel_for(cfg.replications, [&](std::size_t rep) {
                    const Matrix x = sample(conv.spec, n, derive_seed(cell, {rep, 0}));
                    const RankMatrix r = ranks(x, derive_seed(cell, {rep, 1}));
                    for (std::size_t s = 0; s < cfg.stats.size(); ++s)
                        reject[s][rep] = tables[s].p_value(compute_statistic(cfg.stats[s], r)) <= cfg.level;
                });
                for (std::size_t s = 0; s < cfg.stats.size(); ++s) {
                    std::size_t k = 0;
                    for (char c : reject[s]) k += static_cast<std::size_t>(c);
                    rows.push_back({f, tau, n, cfg.stats[s], static_cast<double>(k) / static_cast<double>(cfg.replications), k,
                                    cfg.replications, conv.warning});
                }
            }
        }
    }
    return rows;
}

}  // namespace cumcop
