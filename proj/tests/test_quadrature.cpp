#include <catch_amalgamated.hpp>

#include <cumcop/parallel.hpp>
#include <cumcop/quadrature.hpp>
#include <cumcop/random.hpp>
#include <cumcop/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

using namespace cumcop;
using Catch::Approx;

namespace {

const Method all_methods[] = {Method::sobol, Method::midpoint_grid, Method::monte_carlo};

double prod2(const double* u) { return u[0] * u[1]; }
double min2(const double* u) { return std::min(u[0], u[1]); }

}  // namespace

TEST_CASE("constant integrand is exact") {
    for (Method m : all_methods)
        for (std::size_t d : {1u, 2u, 3u, 5u}) {
            const auto r = integrate_unit_cube([](const double*) { return 1.0; }, {d, m, 1u << 12, 3});
            CHECK(r.value == Approx(1.0).margin(1e-14));
            CHECK(r.error_estimate == Approx(0.0).margin(1e-14));
        }
}

TEST_CASE("u1*u2 and min(u1,u2) within their error estimates") {
    for (Method m : all_methods) {
        const auto p = integrate_unit_cube(prod2, {2, m, 1u << 14, 9});
        CHECK(std::abs(p.value - 0.25) <= 3 * p.error_estimate + 1e-12);
        const auto mn = integrate_unit_cube(min2, {2, m, 1u << 14, 9});
        CHECK(std::abs(mn.value - 1.0 / 3.0) <= 3 * mn.error_estimate + 1e-12);
        CHECK(mn.error_estimate > 0.0);
        CHECK(mn.error_estimate < 1e-2);
    }
}

TEST_CASE("sobol beats plain Monte Carlo on a smooth integrand") {
    const auto q = integrate_unit_cube(prod2, {2, Method::sobol, 1u << 14, 1});
    const auto mc = integrate_unit_cube(prod2, {2, Method::monte_carlo, 1u << 14, 1});
    CHECK(q.error_estimate < mc.error_estimate / 10);
}

TEST_CASE("linearity for the deterministic node sets") {
    auto f = [](const double* u) { return std::exp(u[0]) * u[1]; };
    auto g = [](const double* u) { return std::min(u[0], u[1]); };
    for (Method m : {Method::midpoint_grid, Method::sobol}) {
        const IntegrationSpec s{2, m, 1u << 12, 17};
        const double a = 2.5, b = -0.75;
        const double lhs = integrate_unit_cube([&](const double* u) { return a * f(u) + b * g(u); }, s).value;
        const double rhs = a * integrate_unit_cube(f, s).value + b * integrate_unit_cube(g, s).value;
        CHECK(lhs == Approx(rhs).margin(1e-12));
    }
}

TEST_CASE("grid refinement moves the estimate by at most the previous error") {
    auto f = [](const double* u) { return std::sqrt(u[0]) * std::exp(-u[1]); };
    const auto coarse = integrate_unit_cube(f, {2, Method::midpoint_grid, 64 * 64, 0});
    const auto fine = integrate_unit_cube(f, {2, Method::midpoint_grid, 128 * 128, 0});
    CHECK(std::abs(fine.value - coarse.value) <= coarse.error_estimate);
    CHECK(fine.points_used == 128 * 128);
}

TEST_CASE("results do not depend on the thread count") {
    auto f = [](const double* u) { return std::min(u[0], std::min(u[1], u[2])); };
    std::vector<IntegralEstimate> out;
    for (unsigned t : {1u, 3u, 8u}) {
        set_thread_count(t);
        for (Method m : all_methods) out.push_back(integrate_unit_cube(f, {3, m, 100000, 42}));
    }
    set_thread_count(0);
    for (std::size_t i = 3; i < out.size(); ++i) {
        CHECK(out[i].value == out[i % 3].value);
        CHECK(out[i].error_estimate == out[i % 3].error_estimate);
    }
}

TEST_CASE("seed changes randomized estimates only") {
    const auto a = integrate_unit_cube(min2, {2, Method::sobol, 1u << 12, 1});
    const auto b = integrate_unit_cube(min2, {2, Method::sobol, 1u << 12, 2});
    CHECK(a.value != b.value);
    const auto g1 = integrate_unit_cube(min2, {2, Method::midpoint_grid, 1u << 12, 1});
    const auto g2 = integrate_unit_cube(min2, {2, Method::midpoint_grid, 1u << 12, 2});
    CHECK(g1.value == g2.value);
}

TEST_CASE("sobol error estimate is calibrated on a kinked integrand") {
    double ss = 0.0;
    int over = 0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        const auto r = integrate_unit_cube(min2, {2, Method::sobol, 1u << 12, static_cast<std::uint64_t>(s)});
        const double z = (r.value - 1.0 / 3.0) / r.error_estimate;
        ss += z * z;
        over += std::abs(z) > 3.0;
    }
    const double rms = std::sqrt(ss / seeds);
    CHECK(rms > 0.75);
    CHECK(rms < 1.35);
    CHECK(over <= 4);
}

TEST_CASE("invalid integration requests") {
    CHECK_THROWS_AS(integrate_unit_cube(prod2, {0, Method::sobol, 1024, 0}), domain_error);
    CHECK_THROWS_AS(integrate_unit_cube(prod2, {12, Method::sobol, 1024, 0}), domain_error);
    CHECK_THROWS_AS(integrate_unit_cube(prod2, {17, Method::sobol, 1u << 20, 0}), domain_error);
    CHECK_THROWS_AS(integrate_unit_cube([](const double*) { return std::numeric_limits<double>::infinity(); },
                                        {2, Method::sobol, 1024, 0}),
                    non_finite_integrand);
    CHECK_THROWS_AS(integrate_unit_cube([](const double* u) { return u[0] > 0.5 ? std::nan("") : 0.0; },
                                        {2, Method::midpoint_grid, 1024, 0}),
                    non_finite_integrand);
}

TEST_CASE("method names round-trip") {
    for (Method m : all_methods) CHECK(parse_method(method_name(m)) == m);
    CHECK(parse_method("qmc") == Method::sobol);
    CHECK_THROWS_AS(parse_method("simpson"), domain_error);
    CHECK(default_points(2) == 1u << 14);
    CHECK(default_points(4) == 1u << 16);
}

TEST_CASE("scrambled and shifted Sobol points form a (0,m,2)-net") {
    Engine g = make_engine(123);
    Sobol sob(2);
    sob.scramble([&g] { return g() >> 32; });
    sob.set_shift({static_cast<std::uint32_t>(g()), static_cast<std::uint32_t>(g())});
    const int m = 10;
    std::vector<std::array<double, 2>> pts(1u << m);
    std::uint32_t x[2];
    for (std::size_t i = 0; i < pts.size(); ++i) {
        sob.point_bits(i, x);
        pts[i] = {Sobol::to_unit(x[0]), Sobol::to_unit(x[1])};
    }
    // Every elementary box of area 2^-m holds exactly one point.
    for (int a = 0; a <= m; ++a) {
        const int b = m - a;
        std::vector<int> cnt(std::size_t{1} << m, 0);
        for (const auto& p : pts) {
            const auto i = static_cast<std::size_t>(std::floor(p[0] * (1 << a)));
            const auto j = static_cast<std::size_t>(std::floor(p[1] * (1 << b)));
            ++cnt[(i << b) | j];
        }
        CHECK(std::all_of(cnt.begin(), cnt.end(), [](int c) { return c == 1; }));
    }
}

TEST_CASE("Sobol advance agrees with direct evaluation") {
    Sobol sob(5);
    std::vector<std::uint32_t> state(5), direct(5);
    sob.point_bits(0, state.data());
    for (std::uint64_t i = 1; i < 3000; ++i) {
        sob.advance(i, state.data());
        sob.point_bits(i, direct.data());
        REQUIRE(state == direct);
    }
    CHECK_THROWS_AS(Sobol(0), domain_error);
    CHECK_THROWS_AS(Sobol(17), domain_error);
    CHECK(Sobol::to_unit(0) > 0.0);
    CHECK(Sobol::to_unit(0xffffffffu) < 1.0);
}
