#include <catch_amalgamated.hpp>

#include <cumcop/dynamics.hpp>

#include <cmath>
#include <limits>

using namespace cumcop;
using Catch::Approx;

TEST_CASE("identical starts stay on the diagonal") {
    RulkovParams p;
    p.x0 = p.y0 = 0.3;
    p.delta = -3.0;
    const Matrix t = simulate_rulkov(p);
    REQUIRE(t.rows() == p.n);
    for (std::size_t i = 0; i < t.rows(); ++i) REQUIRE(t(i, 0) == t(i, 1));
}

TEST_CASE("one step of the coupled map") {
    RulkovParams p;
    p.delta = 2.0;
    p.beta = 0.3;
    p.gamma = 0.05;
    p.n = 2;
    p.burn_in = 0;
    const Matrix t = simulate_rulkov(p);
    CHECK(t(0, 0) == 0.1);
    CHECK(t(0, 1) == 0.5);
    CHECK(t(1, 0) == Approx(1.980198 + 0.3 + 0.4 * 0.05).margin(1e-6));
    CHECK(t(1, 1) == Approx(2.0 / 1.25 + 0.3 - 0.4 * 0.05).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
    RulkovParams p;
    p.n = 0;
    p.burn_in = 0;
    CHECK_THROWS_AS(simulate_rulkov(p), domain_error);
    p.n = 10;
    p.burn_in = 10;
    CHECK_THROWS_AS(simulate_rulkov(p), domain_error);
    p.burn_in = 2;
    p.gamma = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(simulate_rulkov(p), domain_error);
    CHECK_THROWS_AS(bifurcation_scan({}, RulkovParams{}), domain_error);
}

TEST_CASE("overflow reports the step") {
    RulkovParams p;
    p.beta = 1e308;
    p.gamma = 1e308;
    p.n = 10;
    p.burn_in = 0;
    try {
        simulate_rulkov(p);
        FAIL("expected an error");
    } catch (const domain_error& e) {
        CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
}

TEST_CASE("regime classification") {
    CHECK(classify(1) == Regime::period1);
    CHECK(classify(2) == Regime::periodic);
    CHECK(classify(50) == Regime::periodic);
    CHECK(classify(51) == Regime::chaotic);
    CHECK(dedupe({1.0, 1.0 + 1e-7, 2.0, 0.5}) == std::vector<double>{0.5, 1.0, 2.0});
}

TEST_CASE("bifurcation scan at the defaults") {
    const auto rows = bifurcation_scan({-1.8, -2.2, -2.6, -3.0}, RulkovParams{});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].values.size() == 1);
    CHECK(rows[0].regime == Regime::period1);
    CHECK(rows[1].values.size() == 2);
    CHECK(rows[1].regime == Regime::periodic);
    CHECK(rows[2].regime == Regime::periodic);
    CHECK(rows[3].values.size() > 50);
    CHECK(rows[3].regime == Regime::chaotic);
    for (const auto& r : rows) CHECK(std::is_sorted(r.values.begin(), r.values.end()));
}

TEST_CASE("CCTE rises from periodic to chaotic") {
    const auto rows = rulkov_ccte(default_rulkov_deltas(), Alpha(2.0), RulkovParams{}, {2, Method::sobol, 1u << 14, 0}, 1);
    REQUIRE(rows.size() == 5);
    double p1 = 0, per = 0, ch = 0;
    for (const auto& r : rows) {
        CHECK(r.ccte.value >= 0.0);
        if (r.regime == Regime::period1) p1 = std::max(p1, r.ccte.value);
        if (r.regime == Regime::periodic) per = std::max(per, r.ccte.value);
        if (r.regime == Regime::chaotic) ch = std::max(ch, r.ccte.value);
    }
    CHECK(p1 < per);
    CHECK(per < ch);
}

TEST_CASE("trajectories are bit-identical across runs") {
    const Matrix a = simulate_rulkov(RulkovParams{});
    const Matrix b = simulate_rulkov(RulkovParams{});
    CHECK(a.data() == b.data());
}
