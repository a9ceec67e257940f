#include <catch_amalgamated.hpp>

#include <cumcop/independence.hpp>
#include <cumcop/parallel.hpp>
#include <cumcop/sampling.hpp>

#include <cmath>
#include <numeric>

using namespace cumcop;
using Catch::Approx;

namespace {

const RankMatrix co{{1, 1}, {2, 2}};
const RankMatrix anti{{1, 2}, {2, 1}};

RankMatrix draw(const CopulaSpec& c, std::size_t n, std::uint64_t seed) { return ranks(sample(c, n, seed), seed); }

}  // namespace

TEST_CASE("statistics on the two-point examples") {
    CHECK(chi2_div_stat(co) == Approx(0.238966).margin(1e-6));
    // 2 * (1/2) ln(3/2) (ln 3 + ln(3/2)) - 8/9 + 1/2
    const double l = std::log(1.5);
    CHECK(chi2_div_stat(anti) == Approx(l * (std::log(3.0) + l) - 8.0 / 9.0 + 0.5).epsilon(1e-12));
    CHECK(chi2_div_stat(anti) == Approx(0.220962).margin(1e-6));
    CHECK(cvm_stat(co) == Approx(5.0 / 81.0).epsilon(1e-13));
    CHECK(cvm_stat(anti) == Approx(cvm_stat(co)).epsilon(1e-13));
    CHECK(ks_stat(co) == Approx(std::sqrt(2.0) * 5.0 / 9.0).epsilon(1e-13));
    CHECK_THROWS_AS(chi2_div_stat(RankMatrix{{1, 1}}), data_error);
    CHECK_THROWS_AS(cvm_stat(RankMatrix{{1, 1}}), data_error);
    CHECK_THROWS_AS(ks_stat(RankMatrix{{1, 1}}), data_error);
}

TEST_CASE("CVM equals n times the integrated squared distance") {
    const RankMatrix r = draw(CopulaSpec::clayton(1.0), 100, 3);
    const CopulaSpec emp = CopulaSpec::empirical(r), P = CopulaSpec::product();
    const auto q = integrate_unit_cube(
        [&](const double* u) {
            const double x = emp.cdf(u) - P.cdf(u);
            return 100.0 * x * x;
        },
        {2, Method::sobol, 1u << 16, 0});
    CHECK(std::abs(cvm_stat(r) - q.value) <= 3 * q.error_estimate + 1e-9);
}

TEST_CASE("statistics are nonnegative and row-order invariant") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const RankMatrix r = draw(s % 2 ? CopulaSpec::frank(-3.0) : CopulaSpec::product(), 30, s);
        std::vector<std::size_t> order(30);
        std::iota(order.rbegin(), order.rend(), std::size_t{0});
        const RankMatrix p = r.permuted_rows(order);
        for (Statistic st : {Statistic::chi2_div, Statistic::cvm, Statistic::ks}) {
            const double v = compute_statistic(st, r);
            CHECK(v >= 0.0);
            CHECK(compute_statistic(st, p) == Approx(v).epsilon(1e-12));
        }
    }
}

TEST_CASE("KS scale under independence and perfect dependence") {
    const double indep = ks_stat(draw(CopulaSpec::product(), 10000, 1));
    CHECK(indep > 0.1);
    CHECK(indep < 2.0);
    const double dep = ks_stat(draw(CopulaSpec::frechet_upper(), 10000, 1));
    CHECK(dep / std::sqrt(10000.0) == Approx(0.25).margin(0.01));
}

TEST_CASE("KS evaluation paths agree") {
    const RankMatrix r2 = draw(CopulaSpec::clayton(1.5), 60, 2);
    CHECK(detail::ks_bivariate(r2) == Approx(detail::ks_lattice(r2)).epsilon(1e-14));
    const RankMatrix r3 = draw(CopulaSpec::gumbel(1.5, 3), 60, 2);
    const double lattice = detail::ks_lattice(r3), meets = detail::ks_meets(r3, 1u << 20);
    CHECK(meets <= lattice + 1e-15);
    CHECK(meets >= 0.7 * lattice);
    CHECK(ks_stat(r3) == Approx(std::sqrt(60.0) * lattice).epsilon(1e-14));
}

TEST_CASE("bootstrap p-values") {
    const RankMatrix strong = draw(CopulaSpec::gaussian(0.95), 50, 4);
    for (Statistic s : {Statistic::chi2_div, Statistic::cvm, Statistic::ks}) {
        const TestReport t = bootstrap_pvalue(s, strong, 500, 7);
        CHECK(t.p_value < 0.01);
        CHECK(t.n == 50);
        CHECK(t.d == 2);
        CHECK(t.B == 500);
    }
    CHECK_THROWS_AS(bootstrap_pvalue(Statistic::cvm, strong, 99, 7), domain_error);
}

TEST_CASE("test size under independence") {
    const NullTable table = build_null_table(Statistic::chi2_div, 50, 2, 500, 11);
    int rejections = 0;
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        const RankMatrix r = draw(CopulaSpec::product(), 50, 1000 + rep);
        rejections += table.p_value(chi2_div_stat(r)) <= 0.05;
    }
    const double rate = rejections / 200.0;
    CHECK(rate >= 0.02);
    CHECK(rate <= 0.09);
}

TEST_CASE("null table properties") {
    const NullTable a = build_null_table(Statistic::cvm, 20, 3, 200, 5);
    const NullTable b = build_null_table(Statistic::cvm, 20, 3, 200, 5);
    CHECK(a.values == b.values);
    CHECK(std::is_sorted(a.sorted.begin(), a.sorted.end()));
    CHECK(a.p_value(-1.0) == 1.0);
    CHECK(a.p_value(1e9) == 0.0);
    double prev = 1.0;
    for (double x = 0.0; x < 0.5; x += 0.01) {
        const double p = a.p_value(x);
        CHECK(p <= prev);
        CHECK(p >= 0.0);
        prev = p;
    }
    // p counts replicates >= observed
    CHECK(a.p_value(a.sorted[150]) == Approx(50.0 / 200.0));
    // Shared replicates across statistics.
    const auto both = build_null_tables({Statistic::chi2_div, Statistic::cvm}, 20, 3, 200, 5);
    CHECK(both[1].values == a.values);
}

TEST_CASE("bootstrap does not depend on the data or the thread count") {
    const RankMatrix x = draw(CopulaSpec::product(), 40, 1), y = draw(CopulaSpec::clayton(3.0), 40, 2);
    set_thread_count(1);
    const NullTable t1 = build_null_table(Statistic::ks, 40, 2, 300, 9);
    const TestReport rx1 = bootstrap_pvalue(Statistic::ks, x, 300, 9);
    set_thread_count(5);
    const NullTable t5 = build_null_table(Statistic::ks, 40, 2, 300, 9);
    const TestReport rx5 = bootstrap_pvalue(Statistic::ks, x, 300, 9);
    set_thread_count(0);
    CHECK(t1.values == t5.values);
    CHECK(rx1.p_value == rx5.p_value);
    CHECK(bootstrap_pvalue(Statistic::ks, y, 300, 9).p_value == t1.p_value(ks_stat(y)));
}

TEST_CASE("power study") {
    PowerConfig cfg;
    cfg.families = {Family::clayton, Family::fgm};
    cfg.taus = {0.0, 0.3};
    cfg.ns = {30};
    cfg.stats = {Statistic::chi2_div, Statistic::cvm};
    cfg.replications = 100;
    cfg.B = 200;
    cfg.seed = 3;
    const auto rows = power_study(cfg);
    REQUIRE(rows.size() == 2 * 2 * 1 * 2);
    for (const auto& r : rows) {
        CHECK(r.power == Approx(static_cast<double>(r.rejections) / 100.0));
        CHECK(r.replications == 100);
        if (r.tau == 0.0) CHECK(r.power < 0.15);
    }
    // Clayton tau = 0.3 is strong enough at n = 30 to be detected often.
    CHECK(rows[2].power > 0.4);
    // FGM cannot reach tau = 0.3; the clamp is reported.
    CHECK_FALSE(rows[6].warning.empty());
    set_thread_count(3);
    const auto again = power_study(cfg);
    set_thread_count(0);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].rejections == again[i].rejections);
}

TEST_CASE("power config validation") {
    PowerConfig cfg;
    cfg.families = {Family::gumbel};
    cfg.taus = {-0.2};
    cfg.ns = {30};
    CHECK_THROWS_AS(validate(cfg), domain_error);
    cfg.taus = {0.2};
    CHECK_NOTHROW(validate(cfg));
    cfg.B = 50;
    CHECK_THROWS_AS(validate(cfg), domain_error);
    cfg.B = 500;
    cfg.level = 1.0;
    CHECK_THROWS_AS(validate(cfg), domain_error);
    cfg.level = 0.05;
    cfg.ns = {1};
    CHECK_THROWS_AS(validate(cfg), domain_error);
    cfg.ns = {};
    CHECK_THROWS_AS(validate(cfg), domain_error);
}

TEST_CASE("statistic names") {
    for (Statistic s : {Statistic::chi2_div, Statistic::cvm, Statistic::ks}) CHECK(parse_statistic(statistic_name(s)) == s);
    CHECK(parse_statistic("chi2") == Statistic::chi2_div);
    CHECK_THROWS_AS(parse_statistic("ad"), domain_error);
}
