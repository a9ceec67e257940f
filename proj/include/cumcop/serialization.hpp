#pragma once

// JSON conversions. Requires nlohmann/json (vendor/json.hpp) on the include
// path; the numerical headers do not.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "copula.hpp"
#include "errors.hpp"
#include "independence.hpp"
#include "measures.hpp"
#include "quadrature.hpp"
#include "rank_matrix.hpp"
#include "version.hpp"

namespace cumcop {

using json = nlohmann::ordered_json;

namespace detail {

inline double get_number(const json& params, const char* key) {
    if (!params.contains(key)) throw domain_error(std::string("copula params need '") + key + "'");
    const json& v = params.at(key);
    if (!v.is_number()) throw domain_error(std::string("copula param '") + key + "' must be a number");
    return v.get<double>();
}

inline std::vector<double> get_numbers(const json& params, const char* key) {
    if (!params.contains(key) || !params.at(key).is_array())
        throw domain_error(std::string("copula params need an array '") + key + "'");
    std::vector<double> out;
    for (const json& v : params.at(key)) {
        if (!v.is_number()) throw domain_error(std::string("copula param '") + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace detail

/// {family, d, params}. Mixtures nest their children under params.children;
/// the empirical copula carries its rank rows under params.ranks.
inline json to_json(const CopulaSpec& c) {
    json p = json::object();
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, fam::Clayton> || std::is_same_v<T, fam::Gumbel> ||
                          std::is_same_v<T, fam::Frank> || std::is_same_v<T, fam::FGM>) {
                p["theta"] = f.theta;
            } else if constexpr (std::is_same_v<T, fam::MarshallOlkin>) {
                p["p"] = f.p;
                p["q"] = f.q;
            } else if constexpr (std::is_same_v<T, fam::CuadrasAuge>) {
                p["gamma"] = f.gamma;
            } else if constexpr (std::is_same_v<T, fam::GumbelBarnett>) {
                p["phi"] = f.phi;
            } else if constexpr (std::is_same_v<T, fam::Gaussian>) {
                p["rho"] = f.rho;
            } else if constexpr (std::is_same_v<T, fam::StudentT>) {
                p["rho"] = f.rho;
                p["nu"] = f.nu;
            } else if constexpr (std::is_same_v<T, fam::Empirical>) {
                const RankMatrix& r = f.index->ranks();
                json rows = json::array();
                for (std::size_t j = 0; j < r.n(); ++j) {
                    json row = json::array();
                    for (std::size_t k = 0; k < r.d(); ++k) row.push_back(r(j, k));
                    rows.push_back(std::move(row));
                }
                p["ranks"] = std::move(rows);
            } else if constexpr (std::is_same_v<T, fam::WAM> || std::is_same_v<T, fam::WGM>) {
                json ch = json::array();
                for (const auto& child : *f.children) ch.push_back(to_json(child));
                p["children"] = std::move(ch);
                if constexpr (std::is_same_v<T, fam::WAM>)
                    p["weights"] = f.weights;
                else
                    p["exponents"] = f.exponents;
            }
        },
        c.variant());
    return json{{"family", std::string(family_name(c.family()))}, {"d", c.dimension()}, {"params", std::move(p)}};
}

inline CopulaSpec copula_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
        throw domain_error("copula JSON needs a string 'family'");
    const Family f = parse_family(j.at("family").get<std::string>());
    std::size_t d = 2;
    if (j.contains("d")) {
        if (!j.at("d").is_number_unsigned()) throw domain_error("copula 'd' must be a positive integer");
        d = j.at("d").get<std::size_t>();
    }
    const json p = j.contains("params") ? j.at("params") : json::object();
    if (!p.is_object()) throw domain_error("copula 'params' must be an object");
    auto fixed2 = [&] {
        if (d != 2) throw dimension_error(std::string(family_name(f)) + " is bivariate only");
    };
    switch (f) {
        case Family::product: return CopulaSpec::product(d);
        case Family::frechet_upper: return CopulaSpec::frechet_upper(d);
        case Family::frechet_lower: fixed2(); return CopulaSpec::frechet_lower();
        case Family::clayton: return CopulaSpec::clayton(detail::get_number(p, "theta"), d);
        case Family::gumbel: return CopulaSpec::gumbel(detail::get_number(p, "theta"), d);
        case Family::frank: return CopulaSpec::frank(detail::get_number(p, "theta"), d);
        case Family::fgm: fixed2(); return CopulaSpec::fgm(detail::get_number(p, "theta"));
        case Family::marshall_olkin:
            fixed2();
            return CopulaSpec::marshall_olkin(detail::get_number(p, "p"), detail::get_number(p, "q"));
        case Family::cuadras_auge: {
            auto g = detail::get_numbers(p, "gamma");
            if (g.size() != d) throw dimension_error("Cuadras-Auge needs d exponents");
            return CopulaSpec::cuadras_auge(std::move(g));
        }
        case Family::gumbel_barnett: fixed2(); return CopulaSpec::gumbel_barnett(detail::get_number(p, "phi"));
        case Family::gaussian: fixed2(); return CopulaSpec::gaussian(detail::get_number(p, "rho"));
        case Family::student_t:
            fixed2();
            return CopulaSpec::student_t(detail::get_number(p, "rho"), p.contains("nu") ? detail::get_number(p, "nu") : 4.0);
        case Family::counterexample: fixed2(); return CopulaSpec::counterexample();
        case Family::empirical: {
            if (!p.contains("ranks") || !p.at("ranks").is_array() || p.at("ranks").empty())
                throw domain_error("empirical copula needs params.ranks");
            const json& rows = p.at("ranks");
            std::vector<std::uint32_t> flat;
            for (const json& row : rows) {
                if (!row.is_array() || row.size() != d) throw dimension_error("every rank row must have d entries");
                for (const json& v : row) {
                    if (!v.is_number_unsigned()) throw domain_error("ranks must be positive integers");
                    flat.push_back(v.get<std::uint32_t>());
                }
            }
            return CopulaSpec::empirical(RankMatrix(rows.size(), d, std::move(flat)));
        }
        case Family::wam:
        case Family::wgm: {
            if (!p.contains("children") || !p.at("children").is_array()) throw domain_error("mixtures need params.children");
            std::vector<CopulaSpec> ch;
            for (const json& c : p.at("children")) ch.push_back(copula_from_json(c));
            if (!ch.empty() && ch.front().dimension() != d) throw dimension_error("mixture children do not match d");
            return f == Family::wam ? CopulaSpec::wam(std::move(ch), detail::get_numbers(p, "weights"))
                                    : CopulaSpec::wgm(std::move(ch), detail::get_numbers(p, "exponents"));
        }
    }
    throw domain_error("unhandled family");
}

/// Provenance block attached to every CLI output.
inline json run_metadata(std::uint64_t seed, std::size_t points, std::string_view method) {
    return json{{"seed", seed}, {"points", points}, {"method", std::string(method)}, {"version", version}};
}

inline json to_json(const MeasureResult& m) {
    return json{{"value", m.value},
                {"error_estimate", m.error_estimate},
                {"method", std::string(measure_method_name(m.method))},
                {"points_used", m.points_used}};
}

inline json to_json(const TestReport& t) {
    return json{{"statistic", std::string(statistic_name(t.statistic))},
                {"observed", t.observed},
                {"B", t.B},
                {"p_value", t.p_value},
                {"seed", t.seed},
                {"n", t.n},
                {"d", t.d}};
}

/// {families, taus, ns, stats?, replications?, B?, level?, seed?, nu?}
inline PowerConfig power_config_from_json(const json& j) {
    if (!j.is_object()) throw domain_error("power config must be a JSON object");
    static const char* known[] = {"families", "taus", "ns", "stats", "replications", "B", "level", "seed", "nu"};
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (const char* name : known) ok = ok || k == name;
        if (!ok) throw domain_error("unknown power config key '" + k + "'");
    }
    PowerConfig cfg;
    auto array = [&](const char* key) -> const json& {
        if (!j.contains(key) || !j.at(key).is_array()) throw domain_error(std::string("power config needs an array '") + key + "'");
        return j.at(key);
    };
    try {
        for (const json& f : array("families")) cfg.families.push_back(parse_family(f.get<std::string>()));
        for (const json& t : array("taus")) cfg.taus.push_back(t.get<double>());
        for (const json& n : array("ns")) cfg.ns.push_back(n.get<std::size_t>());
        if (j.contains("stats")) {
            cfg.stats.clear();
            for (const json& s : array("stats")) cfg.stats.push_back(parse_statistic(s.get<std::string>()));
        }
        if (j.contains("replications")) cfg.replications = j.at("replications").get<std::size_t>();
        if (j.contains("B")) cfg.B = j.at("B").get<std::size_t>();
        if (j.contains("level")) cfg.level = j.at("level").get<double>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("nu")) cfg.nu = j.at("nu").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("malformed power config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

}  // namespace cumcop
