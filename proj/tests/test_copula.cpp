#include <catch_amalgamated.hpp>

#include <cumcop/copula.hpp>
#include <cumcop/dependence.hpp>
#include <cumcop/random.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace cumcop;
using Catch::Approx;

namespace {

double at(const CopulaSpec& c, std::vector<double> u) { return eval_cdf(c, u); }

// Every family with a CDF, in a few dimensions.
std::vector<CopulaSpec> catalog() {
    return {
        CopulaSpec::product(2),
        CopulaSpec::product(4),
        CopulaSpec::frechet_upper(3),
        CopulaSpec::frechet_lower(),
        CopulaSpec::clayton(1.5),
        CopulaSpec::clayton(-0.4),
        CopulaSpec::clayton(2.0, 3),
        CopulaSpec::gumbel(2.0),
        CopulaSpec::gumbel(1.3, 4),
        CopulaSpec::frank(2.5),
        CopulaSpec::frank(-6.0),
        CopulaSpec::frank(3.0, 3),
        CopulaSpec::fgm(0.7),
        CopulaSpec::fgm(-1.0),
        CopulaSpec::marshall_olkin(0.5, 0.3),
        CopulaSpec::cuadras_auge({1.0, 0.6, 0.3}),
        CopulaSpec::gumbel_barnett(0.8),
        CopulaSpec::counterexample(),
        CopulaSpec::wam({CopulaSpec::frechet_lower(), CopulaSpec::fgm(0.5)}, {0.3, 0.7}),
        CopulaSpec::wgm({CopulaSpec::frechet_upper(), CopulaSpec::product()}, {0.4, 0.6}),
    };
}

}  // namespace

TEST_CASE("CDF examples") {
    CHECK(at(CopulaSpec::product(), {0.5, 0.5}) == 0.25);
    CHECK(at(CopulaSpec::frechet_lower(), {0.3, 0.4}) == 0.0);
    CHECK(at(CopulaSpec::frechet_upper(), {0.2, 0.7}) == 0.2);
    // -1/2.5 log(1 + (e^-1.25 - 1)^2 / (e^-2.5 - 1))
    const double e1 = std::expm1(-1.25), e2 = std::expm1(-2.5);
    CHECK(at(CopulaSpec::frank(2.5), {0.5, 0.5}) == Approx(-std::log1p(e1 * e1 / e2) / 2.5).epsilon(1e-14));
    CHECK(at(CopulaSpec::frank(2.5), {0.5, 0.5}) == Approx(0.3235128).margin(1e-7));
    CHECK(at(CopulaSpec::clayton(1.0), {0.5, 0.5}) == Approx(1.0 / 3.0));
    CHECK(at(CopulaSpec::fgm(1.0), {0.5, 0.5}) == Approx(0.25 * 1.25));
    CHECK(at(CopulaSpec::marshall_olkin(1.0, 1.0), {0.3, 0.6}) == Approx(0.3));
    CHECK(at(CopulaSpec::marshall_olkin(0.0, 0.0), {0.3, 0.6}) == Approx(0.18));
    CHECK(at(CopulaSpec::counterexample(), {0.5, 0.5}) == Approx(1.0 / (1.0 + std::sqrt(2.0))));
    CHECK(at(CopulaSpec::counterexample(), {0.0, 0.5}) == 0.0);
}

TEST_CASE("Frechet-Hoeffding bounds, groundedness and uniform margins") {
    Engine g = make_engine(77);
    for (const auto& c : catalog()) {
        INFO(c.describe());
        const std::size_t d = c.dimension();
        std::vector<double> u(d);
        for (int it = 0; it < 1000; ++it) {
            for (auto& x : u) x = open_uniform(g);
            const double v = c.cdf(u.data());
            double lo = 1.0 - static_cast<double>(d), hi = 1.0;
            for (double x : u) {
                lo += x;
                hi = std::min(hi, x);
            }
            REQUIRE(v >= std::max(lo, 0.0) - 1e-12);
            REQUIRE(v <= hi + 1e-12);
            const std::size_t k = bounded(g, d);
            auto z = u;
            z[k] = 0.0;
            REQUIRE(c.cdf(z.data()) == 0.0);
            std::vector<double> ones(d, 1.0);
            ones[k] = u[k];
            REQUIRE(c.cdf(ones.data()) == Approx(u[k]).margin(1e-12));
        }
    }
}

TEST_CASE("combinators") {
    Engine g = make_engine(5);
    const auto M = CopulaSpec::frechet_upper(), P = CopulaSpec::product();
    for (double gam : {0.0, 0.3, 1.0}) {
        const auto w = CopulaSpec::wam({M, P}, {gam, 1.0 - gam});
        const auto geo = CopulaSpec::wgm({M, P}, {gam, 1.0 - gam});
        const auto ca = CopulaSpec::cuadras_auge({1.0, 1.0 - gam});
        CHECK_FALSE(geo.possibly_invalid());
        for (int i = 0; i < 1000; ++i) {
            const double u[2] = {open_uniform(g), open_uniform(g)};
            REQUIRE(w.cdf(u) == Approx(gam * M.cdf(u) + (1 - gam) * P.cdf(u)).margin(1e-12));
            REQUIRE(geo.cdf(u) == Approx(ca.cdf(u)).margin(1e-12));
        }
    }
    CHECK(CopulaSpec::wgm({CopulaSpec::frechet_lower(), P}, {0.5, 0.5}).possibly_invalid());
    CHECK_THROWS_AS(CopulaSpec::wam({M, P}, {0.5, 0.6}), domain_error);
    CHECK_THROWS_AS(CopulaSpec::wam({M, P}, {1.5, -0.5}), domain_error);
    CHECK_THROWS_AS(CopulaSpec::wam({M}, {0.5, 0.5}), domain_error);
    CHECK_THROWS_AS(CopulaSpec::wam({M, CopulaSpec::product(3)}, {0.5, 0.5}), dimension_error);
    CHECK_THROWS_AS(CopulaSpec::wam({}, {}), domain_error);
}

TEST_CASE("parameter domains") {
    CHECK_THROWS_AS(CopulaSpec::clayton(0.0), domain_error);
    CHECK_THROWS_AS(CopulaSpec::clayton(-1.5), domain_error);
    CHECK_THROWS_AS(CopulaSpec::clayton(-0.6, 3), domain_error);
    CHECK_NOTHROW(CopulaSpec::clayton(-1.0));
    CHECK_THROWS_AS(CopulaSpec::gumbel(0.9), domain_error);
    CHECK_THROWS_AS(CopulaSpec::frank(0.0), domain_error);
    CHECK_THROWS_AS(CopulaSpec::frank(-1.0, 3), domain_error);
    CHECK_THROWS_AS(CopulaSpec::fgm(1.1), domain_error);
    CHECK_THROWS_AS(CopulaSpec::marshall_olkin(1.2, 0.0), domain_error);
    CHECK_THROWS_AS(CopulaSpec::cuadras_auge({0.5, 0.2}), domain_error);
    CHECK_THROWS_AS(CopulaSpec::cuadras_auge({1.0, 0.2, 0.5}), domain_error);
    CHECK_THROWS_AS(CopulaSpec::gumbel_barnett(-0.1), domain_error);
    CHECK_THROWS_AS(CopulaSpec::gaussian(1.0), domain_error);
    CHECK_THROWS_AS(CopulaSpec::student_t(0.5, 0.0), domain_error);
    CHECK_THROWS_AS(CopulaSpec::product(1), dimension_error);
    CHECK_THROWS_AS(CopulaSpec::fgm(std::nan("")), domain_error);
}

TEST_CASE("Gaussian and Student-t have no CDF") {
    for (const auto& c : {CopulaSpec::gaussian(0.3), CopulaSpec::student_t(0.3, 4.0)}) {
        CHECK_FALSE(c.has_cdf());
        CHECK_THROWS_AS(at(c, {0.5, 0.5}), unsupported_error);
    }
    CHECK_FALSE(CopulaSpec::wam({CopulaSpec::gaussian(0.3), CopulaSpec::product()}, {0.5, 0.5}).has_cdf());
    CHECK(CopulaSpec::frank(1.0).has_cdf());
}

TEST_CASE("eval_cdf argument checks") {
    CHECK_THROWS_AS(at(CopulaSpec::product(3), {0.5, 0.5}), dimension_error);
    CHECK_THROWS_AS(at(CopulaSpec::product(), {0.5, 1.5}), domain_error);
    CHECK_THROWS_AS(at(CopulaSpec::product(), {std::nan(""), 0.5}), domain_error);
}

TEST_CASE("family names and descriptions") {
    for (const auto& c : catalog()) CHECK(parse_family(family_name(c.family())) == c.family());
    CHECK(parse_family("W") == Family::frechet_lower);
    CHECK(parse_family("normal") == Family::gaussian);
    CHECK_THROWS_AS(parse_family("vine"), domain_error);
    CHECK(CopulaSpec::clayton(1.5).describe() == "clayton(1.5;d=2)");
    CHECK(CopulaSpec::product(3).describe() == "product(d=3)");
    CHECK(CopulaSpec::marshall_olkin(0.5, 0.3).params() == std::vector<double>{0.5, 0.3});
}

TEST_CASE("tau_to_param examples") {
    const auto c = tau_to_param({Family::clayton, 0.2});
    REQUIRE(c.parameter);
    CHECK(*c.parameter == Approx(0.5));
    const auto g = tau_to_param({Family::gaussian, 0.2});
    CHECK(*g.parameter == Approx(std::sin(0.1 * std::numbers::pi)));
    CHECK(*g.parameter == Approx(0.309017).margin(1e-6));
    CHECK(*tau_to_param({Family::gumbel, 0.5}).parameter == Approx(2.0));
    for (Family f : {Family::clayton, Family::gumbel, Family::frank, Family::fgm, Family::gaussian, Family::student_t}) {
        const auto z = tau_to_param({f, 0.0});
        CHECK(z.spec.family() == Family::product);
        CHECK_FALSE(z.parameter.has_value());
    }
}

TEST_CASE("Frank tau inversion") {
    for (double tau : {-0.6, -0.2, 0.1, 0.2, 0.7}) {
        const double th = *tau_to_param({Family::frank, tau}).parameter;
        CHECK(frank_tau(th) == Approx(tau).margin(1e-9));
    }
    CHECK(frank_tau(1e-9) == Approx(0.0).margin(1e-9));
    CHECK(frank_tau(-3.0) == Approx(-frank_tau(3.0)).margin(1e-12));
}

TEST_CASE("FGM tau is clamped with a warning") {
    const auto ok = tau_to_param({Family::fgm, 0.2});
    CHECK(*ok.parameter == Approx(0.9));
    CHECK(ok.warning.empty());
    const auto clamped = tau_to_param({Family::fgm, -0.3});
    CHECK(*clamped.parameter == -1.0);
    CHECK_FALSE(clamped.warning.empty());
}

TEST_CASE("tau_to_param rejects infeasible requests") {
    CHECK_THROWS_AS(tau_to_param({Family::gumbel, -0.2}), domain_error);
    CHECK_THROWS_AS(tau_to_param({Family::clayton, 1.0}), domain_error);
    CHECK_THROWS_AS(tau_to_param({Family::product, 0.2}), domain_error);
    CHECK_THROWS_AS(tau_to_param({Family::marshall_olkin, 0.2}), domain_error);
    CHECK_THROWS_AS(tau_to_param({Family::gaussian, 0.2}, 3), dimension_error);
}

TEST_CASE("PLOD comparison") {
    CHECK(plod_compare(CopulaSpec::frechet_lower(), CopulaSpec::product(), 20) == PlodOrder::c1_below);
    CHECK(plod_compare(CopulaSpec::product(), CopulaSpec::frechet_upper(), 20) == PlodOrder::c1_below);
    CHECK(plod_compare(CopulaSpec::fgm(0.5), CopulaSpec::fgm(-0.5), 20) == PlodOrder::c1_above);
    CHECK(plod_compare(CopulaSpec::clayton(2.0), CopulaSpec::clayton(1.0), 20) == PlodOrder::c1_above);
    // Every copula lies below M.
    CHECK(plod_compare(CopulaSpec::counterexample(), CopulaSpec::frechet_upper(), 40) == PlodOrder::c1_below);
    CHECK(plod_compare(CopulaSpec::marshall_olkin(0.5, 0.5), CopulaSpec::frank(-3.0), 20) == PlodOrder::c1_above);
    CHECK_THROWS_AS(plod_compare(CopulaSpec::product(2), CopulaSpec::product(3), 10), dimension_error);
    CHECK_THROWS_AS(plod_compare(CopulaSpec::product(), CopulaSpec::product(), 1), domain_error);
}
