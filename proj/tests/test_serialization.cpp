#include <catch_amalgamated.hpp>

#include <cumcop/sampling.hpp>
#include <cumcop/serialization.hpp>

using namespace cumcop;
using Catch::Approx;

namespace {

void round_trip(const CopulaSpec& c) {
    INFO(c.describe());
    const json j = to_json(c);
    const CopulaSpec back = copula_from_json(json::parse(j.dump()));
    CHECK(back.describe() == c.describe());
    CHECK(to_json(back) == j);
    const double u[3] = {0.3, 0.7, 0.55};
    CHECK(back.cdf(u) == c.cdf(u));
}

}  // namespace

TEST_CASE("copula JSON round trip") {
    round_trip(CopulaSpec::product(3));
    round_trip(CopulaSpec::frechet_upper());
    round_trip(CopulaSpec::frechet_lower());
    round_trip(CopulaSpec::clayton(1.5));
    round_trip(CopulaSpec::gumbel(2.0, 3));
    round_trip(CopulaSpec::frank(-3.0));
    round_trip(CopulaSpec::fgm(0.4));
    round_trip(CopulaSpec::marshall_olkin(0.3, 0.6));
    round_trip(CopulaSpec::cuadras_auge({1.0, 0.5}));
    round_trip(CopulaSpec::gumbel_barnett(0.7));
    round_trip(CopulaSpec::counterexample());
    round_trip(CopulaSpec::wam({CopulaSpec::frechet_lower(), CopulaSpec::clayton(2.0)}, {0.4, 0.6}));
    round_trip(CopulaSpec::wgm({CopulaSpec::frechet_upper(), CopulaSpec::product()}, {0.5, 0.5}));
    round_trip(CopulaSpec::empirical(RankMatrix{{1, 2}, {2, 1}, {3, 3}}));
}

TEST_CASE("copula JSON layout") {
    const json j = to_json(CopulaSpec::clayton(1.5));
    CHECK(j.dump() == R"({"family":"clayton","d":2,"params":{"theta":1.5}})");
    const json t = to_json(CopulaSpec::student_t(0.3, 6.0));
    CHECK(t["params"]["nu"] == 6.0);
    CHECK(copula_from_json(json::parse(R"({"family":"student-t","params":{"rho":0.2}})")).describe() ==
          CopulaSpec::student_t(0.2, 4.0).describe());
}

TEST_CASE("malformed copula JSON") {
    CHECK_THROWS_AS(copula_from_json(json::parse("[]")), domain_error);
    CHECK_THROWS_AS(copula_from_json(json::parse(R"({"family":"clayton"})")), domain_error);
    CHECK_THROWS_AS(copula_from_json(json::parse(R"({"family":"clayton","params":{"theta":"x"}})")), domain_error);
    CHECK_THROWS_AS(copula_from_json(json::parse(R"({"family":"nope"})")), domain_error);
    CHECK_THROWS_AS(copula_from_json(json::parse(R"({"family":"fgm","d":3,"params":{"theta":0.1}})")), dimension_error);
    CHECK_THROWS_AS(copula_from_json(json::parse(R"({"family":"product","d":-1})")), domain_error);
    CHECK_THROWS_AS(copula_from_json(json::parse(R"({"family":"empirical","params":{"ranks":[[1,1],[1,2]]}})")), data_error);
    CHECK_THROWS_AS(copula_from_json(json::parse(R"({"family":"wam","params":{"children":[]}})")), domain_error);
}

TEST_CASE("result records") {
    const json m = to_json(MeasureResult{0.25, 1e-4, MeasureMethod::quadrature, 4096});
    CHECK(m["value"] == 0.25);
    CHECK(m["points_used"] == 4096);
    const TestReport t{Statistic::cvm, 0.1, 500, 0.02, 9, 50, 2};
    const json r = to_json(t);
    CHECK(r["statistic"] == std::string(statistic_name(Statistic::cvm)));
    CHECK(r["p_value"] == 0.02);
    CHECK(r["seed"] == 9);
    const json meta = run_metadata(7, 1024, "sobol");
    CHECK(meta["seed"] == 7);
    CHECK(meta.contains("version"));
}

TEST_CASE("power config JSON") {
    const auto cfg = power_config_from_json(json::parse(
        R"({"families":["clayton","frank"],"taus":[0.1],"ns":[50,100],"stats":["ks"],"B":200,"seed":4})"));
    CHECK(cfg.families.size() == 2);
    CHECK(cfg.ns == std::vector<std::size_t>{50, 100});
    CHECK(cfg.stats == std::vector<Statistic>{Statistic::ks});
    CHECK(cfg.B == 200);
    CHECK(cfg.seed == 4);
    CHECK(cfg.replications == 1000);
    CHECK_THROWS_AS(power_config_from_json(json::parse(R"({"families":["clayton"],"taus":[0.1],"ns":[50],"reps":3})")),
                    domain_error);
    CHECK_THROWS_AS(power_config_from_json(json::parse(R"({"families":["clayton"],"taus":[0.1]})")), domain_error);
    CHECK_THROWS_AS(power_config_from_json(json::parse(R"({"families":["clayton"],"taus":["a"],"ns":[50]})")), domain_error);
    CHECK_THROWS_AS(power_config_from_json(json::parse(R"({"families":["clayton"],"taus":[0.1],"ns":[50],"B":10})")),
                    domain_error);
}
