#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <cumcop/cumcop.hpp>
#include <cumcop/serialization.hpp>

namespace {

using namespace cumcop;

struct Globals {
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::size_t points = 0;  // 0 = default for the dimension
    std::string method = "sobol";
};

IntegrationSpec quad(const Globals& g, std::size_t d) {
    return {d, parse_method(g.method), g.points ? g.points : default_points(d), g.seed};
}

// "theta=1.5,nu=4" or "gamma=1:0.5" (colon-separated vectors).
json parse_params(const std::string& s) {
    json p = json::object();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw domain_error("parameter '" + item + "' is not key=value");
        const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (val.find(':') != std::string::npos) {
            json arr = json::array();
            std::stringstream vs(val);
            std::string v;
            while (std::getline(vs, v, ':')) {
                const auto x = parse_double(v);
                if (!x) throw domain_error("parameter '" + key + "' has non-numeric entry '" + v + "'");
                arr.push_back(*x);
            }
            p[key] = std::move(arr);
        } else {
            const auto x = parse_double(val);
            if (!x) throw domain_error("parameter '" + key + "' is not numeric");
            p[key] = *x;
        }
    }
    return p;
}

struct CopulaArgs {
    std::string family, params, spec;
    std::size_t d = 2;

    CopulaSpec build() const {
        if (!spec.empty()) {
            try {
                return copula_from_json(json::parse(spec));
            } catch (const json::parse_error& e) {
                throw domain_error(std::string("bad copula JSON: ") + e.what());
            }
        }
        if (family.empty()) throw domain_error("a copula needs --family or --spec");
        return copula_from_json(json{{"family", family}, {"d", d}, {"params", parse_params(params)}});
    }
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto x = parse_double(item);
        if (!x) throw domain_error("'" + item + "' is not a number");
        out.push_back(*x);
    }
    if (out.empty()) throw domain_error("empty number list");
    return out;
}

// Tables carry their provenance in a leading comment line.
std::string meta_comment(const json& meta) {
    std::string s = "#";
    bool first = true;
    for (const auto& [k, v] : meta.items()) {
        s += (first ? " " : ",") + k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
        first = false;
    }
    return s + "\n";
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw data_error("cannot write '" + path + "'");
        }
    }
    std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

int run_measure(const Globals& g, const std::string& measure, const CopulaArgs& c1, const CopulaArgs& c2, double alpha,
                bool closed) {
    const CopulaSpec a = c1.build();
    const IntegrationSpec q = quad(g, a.dimension());
    json out{{"measure", measure}, {"copula", to_json(a)}};
    if (a.possibly_invalid()) out["warning"] = "weighted geometric mean may not be a copula";
    MeasureResult r;
    auto second = [&] {
        const CopulaSpec b = c2.build();
        out["copula2"] = to_json(b);
        return b;
    };
    if (measure == "ccte") {
        r = closed ? ccte_closed_form(a, Alpha(alpha)) : ccte(a, Alpha(alpha), q);
    } else if (measure == "ccti") {
        r = ccti(a, second(), Alpha(alpha), q);
    } else if (measure == "cctd") {
        r = cctd(a, second(), Alpha(alpha), q);
    } else if (measure == "chi2") {
        r = chi2_divergence(a, second(), q);
    } else if (measure == "cmi") {
        r = cmi(a, Alpha(alpha), q);
    } else if (measure == "spearman") {
        r = spearman_rho(a, q);
    } else {
        throw domain_error("unknown measure '" + measure + "'");
    }
    if (measure != "chi2" && measure != "spearman") out["alpha"] = alpha;
    out["result"] = to_json(r);
    out["meta"] = run_metadata(g.seed, r.points_used, closed ? "closed-form" : g.method);
    print_json(out);
    return 0;
}

int run_empirical(const Globals& g, const std::string& input, double alpha, bool exact) {
    const Matrix x = read_matrix_csv(input);
    if (x.cols() < 2) throw data_error("'" + input + "' needs at least two columns");
    const RankMatrix r = ranks(x, g.seed);
    const Alpha a(alpha);
    const MeasureResult e = exact ? empirical_ccte_cells(r, a) : empirical_ccte(r, a, quad(g, r.d()));
    json out{{"input", input}, {"n", r.n()}, {"d", r.d()}, {"alpha", alpha}, {"ccte", to_json(e)},
             {"jensen_bound", jensen_bound(r, a)}, {"cmi2", empirical_cmi2(r)}};
    out["meta"] = run_metadata(g.seed, e.points_used, exact ? "exact" : g.method);
    print_json(out);
    return 0;
}

int run_test(const Globals& g, const std::string& input, const std::string& stat, std::size_t B, double level) {
    const Matrix x = read_matrix_csv(input);
    if (x.cols() < 2) throw data_error("'" + input + "' needs at least two columns");
    const RankMatrix r = ranks(x, derive_seed(g.seed, {0x7e57u}));
    const TestReport t = bootstrap_pvalue(parse_statistic(stat), r, B, g.seed);
    json out = to_json(t);
    out["level"] = level;
    out["reject"] = t.p_value <= level;
    out["meta"] = run_metadata(g.seed, 0, "bootstrap");
    print_json(out);
    return 0;
}

int run_power(const Globals& g, const std::string& config, const std::string& outpath, bool seed_given) {
    std::ifstream in(config);
    if (!in) throw data_error("cannot open '" + config + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw data_error("'" + config + "' is not valid JSON: " + e.what());
    }
    PowerConfig cfg = power_config_from_json(j);
    if (seed_given || !j.contains("seed")) cfg.seed = g.seed;
    const auto rows = power_study(cfg);
    Output out(outpath);
    json meta = run_metadata(cfg.seed, 0, "null-table");
    meta["replications"] = cfg.replications;
    meta["B"] = cfg.B;
    meta["level"] = cfg.level;
    out.os() << meta_comment(meta) << "family,tau,n,stat,power\n";
    for (const auto& r : rows) {
        out.os() << family_name(r.family) << "," << format_double(r.tau) << "," << r.n << "," << statistic_name(r.stat) << ","
                 << format_double(r.power) << "\n";
        if (!r.warning.empty() && r.stat == cfg.stats.front()) std::cerr << "warning: " << r.warning << "\n";
    }
    return 0;
}

int run_catalog(const Globals& g, const std::string& outpath) {
    const std::size_t pts = g.points ? g.points : (std::size_t{1} << 16);
    const auto rows = closed_form_catalog_report(pts, g.seed, parse_method(g.method));
    Output out(outpath);
    out.os() << meta_comment(run_metadata(g.seed, pts, g.method));
    write_catalog_csv(out.os(), rows);
    return 0;
}

int run_rulkov(const Globals& g, const std::string& deltas, const RulkovParams& p, double alpha, const std::string& prefix) {
    const auto ds = deltas.empty() ? default_rulkov_deltas() : parse_list(deltas);
    const auto bif = bifurcation_scan(ds, p);
    const IntegrationSpec q = quad(g, 2);
    const auto cc = rulkov_ccte(ds, Alpha(alpha), p, q, g.seed);
    json meta = run_metadata(g.seed, q.points, g.method);
    const json extra{{"beta", p.beta}, {"gamma", p.gamma}, {"x0", p.x0}, {"y0", p.y0}, {"n", p.n}, {"burn_in", p.burn_in}, {"alpha", alpha}};
    for (const auto& [k, v] : extra.items()) meta[k] = v;
    {
        Output out(prefix + "_bifurcation.csv");
        out.os() << meta_comment(meta) << "delta,beta,gamma,regime,distinct,x\n";
        for (const auto& r : bif)
            for (double x : r.values)
                out.os() << format_double(r.delta) << "," << format_double(p.beta) << "," << format_double(p.gamma) << ","
                         << regime_name(r.regime) << "," << r.values.size() << "," << format_double(x) << "\n";
    }
    {
        Output out(prefix + "_ccte.csv");
        out.os() << meta_comment(meta) << "delta,beta,gamma,regime,distinct,ccte,error_estimate\n";
        for (const auto& r : cc)
            out.os() << format_double(r.delta) << "," << format_double(p.beta) << "," << format_double(p.gamma) << ","
                     << regime_name(r.regime) << "," << r.distinct << "," << format_double(r.ccte.value) << ","
                     << format_double(r.ccte.error_estimate) << "\n";
    }
    std::cout << prefix << "_bifurcation.csv\n" << prefix << "_ccte.csv\n";
    return 0;
}

struct TsaArgs {
    std::string a, b, date_col = "0", value_col = "1", alphas = "0.5,1,2,5", out;
    std::size_t window = 200, shift = 100;
    bool returns = false;
};

int run_tsa(const Globals& g, const TsaArgs& t) {
    auto load = [&](const std::string& path) {
        const LoadedSeries s = load_series(path, t.date_col, t.value_col);
        if (s.skipped) std::cerr << path << ": skipped " << s.skipped << " rows with missing values\n";
        return t.returns ? s.series : log_returns(s.series);
    };
    const AlignedPairs pairs = align(load(t.a), load(t.b));
    WindowConfig w{t.window, t.shift, parse_list(t.alphas)};
    const IntegrationSpec q = quad(g, 2);
    const auto rows = sliding_cmi(pairs.values, w, q, g.seed);
    Output out(t.out);
    json meta = run_metadata(g.seed, q.points, g.method);
    meta["window"] = t.window;
    meta["shift"] = t.shift;
    out.os() << meta_comment(meta) << "window_end_date,alpha,cmi\n";
    for (const auto& r : rows)
        out.os() << format_date(pairs.dates[r.end_row]) << "," << format_double(r.alpha) << "," << format_double(r.cmi.value) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Copula Tsallis entropy measures, independence tests and diagnostics"};
    app.set_version_flag("--version", std::string(cumcop::version));
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Seed for every stochastic step")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores); results do not depend on it");
    app.add_option("--points", g.points, "Quadrature points (default by dimension)");
    app.add_option("--method", g.method, "Quadrature: sobol, midpoint-grid or monte-carlo")
        ->check(CLI::IsMember({"sobol", "qmc", "midpoint-grid", "grid", "monte-carlo", "mc"}))
        ->capture_default_str();

    // measure
    auto* m = app.add_subcommand("measure", "Information measure of a parametric copula (JSON)");
    std::string measure = "ccte";
    CopulaArgs c1, c2;
    double alpha = 2.0;
    bool closed = false;
    m->add_option("--measure", measure, "ccte, ccti, cctd, chi2, cmi or spearman")
        ->check(CLI::IsMember({"ccte", "ccti", "cctd", "chi2", "cmi", "spearman"}))
        ->capture_default_str();
    m->add_option("--family", c1.family, "Copula family, e.g. clayton, frechet-lower");
    m->add_option("--params", c1.params, "Parameters as key=value pairs, e.g. theta=1.5 or gamma=1:0.5");
    m->add_option("--d", c1.d, "Dimension")->capture_default_str();
    m->add_option("--spec", c1.spec, "Copula as JSON {family, d, params}");
    m->add_option("--family2", c2.family, "Second copula for ccti, cctd and chi2");
    m->add_option("--params2", c2.params, "Parameters of the second copula");
    m->add_option("--spec2", c2.spec, "Second copula as JSON");
    m->add_option("--alpha", alpha, "Tsallis order")->capture_default_str();
    m->add_flag("--closed-form", closed, "Use the exact CCTE (W, Pi, M, Marshall-Olkin)");

    // empirical
    auto* e = app.add_subcommand("empirical", "Empirical CCTE, Jensen bound and alpha=2 CMI of a data CSV (JSON)");
    std::string input;
    bool exact = false;
    e->add_option("--input", input, "CSV with one observation per row")->required();
    e->add_option("--alpha", alpha, "Tsallis order")->capture_default_str();
    e->add_flag("--exact", exact, "Sum over the empirical copula's cells instead of quadrature");

    // test
    auto* t = app.add_subcommand("test", "Bootstrap test of mutual independence (JSON)");
    std::string stat = "chi2";
    std::size_t B = 1000;
    double level = 0.05;
    t->add_option("--input", input, "CSV with one observation per row")->required();
    t->add_option("--stat", stat, "chi2, cvm or ks")->check(CLI::IsMember({"chi2", "chi2_div", "cvm", "ks"}))->capture_default_str();
    t->add_option("--B", B, "Bootstrap replicates (>= 100)")->capture_default_str();
    t->add_option("--level", level, "Nominal level")->capture_default_str();

    // power
    auto* p = app.add_subcommand("power", "Power study from a JSON config (CSV)");
    std::string config, out;
    p->add_option("--config", config, "JSON config {families, taus, ns, stats, replications, B, level, seed, nu}")->required();
    p->add_option("--out", out, "Output CSV (default stdout)");

    // catalog-report
    auto* c = app.add_subcommand("catalog-report", "Closed-form formulas against the quadrature oracle (CSV)");
    c->add_option("--out", out, "Output CSV (default stdout)");

    // rulkov
    auto* r = app.add_subcommand("rulkov", "Bifurcation scan and CCTE of coupled Rulkov maps (two CSVs)");
    RulkovParams rp;
    std::string deltas, prefix = "rulkov";
    r->add_option("--deltas", deltas, "Comma-separated delta values (default -1.8,-2.2,-2.6,-2.8,-3)");
    r->add_option("--beta", rp.beta, "beta")->capture_default_str();
    r->add_option("--gamma", rp.gamma, "Coupling")->capture_default_str();
    r->add_option("--n", rp.n, "Trajectory length")->capture_default_str();
    r->add_option("--burnin", rp.burn_in, "Iterations dropped from the bifurcation table")->capture_default_str();
    r->add_option("--x0", rp.x0, "Initial x")->capture_default_str();
    r->add_option("--y0", rp.y0, "Initial y")->capture_default_str();
    r->add_option("--alpha", alpha, "Tsallis order")->capture_default_str();
    r->add_option("--out-prefix", prefix, "Writes PREFIX_bifurcation.csv and PREFIX_ccte.csv")->capture_default_str();

    // tsa
    auto* s = app.add_subcommand("tsa", "Sliding-window CMI of two dated price series (CSV)");
    TsaArgs ta;
    s->add_option("--a", ta.a, "First series CSV")->required();
    s->add_option("--b", ta.b, "Second series CSV")->required();
    s->add_option("--date-col", ta.date_col, "Date column (header name or 0-based index)")->capture_default_str();
    s->add_option("--value-col", ta.value_col, "Value column (header name or 0-based index)")->capture_default_str();
    s->add_option("--window", ta.window, "Window length")->capture_default_str();
    s->add_option("--shift", ta.shift, "Window step")->capture_default_str();
    s->add_option("--alphas", ta.alphas, "Comma-separated orders")->capture_default_str();
    s->add_flag("--returns", ta.returns, "Inputs are already returns; skip the log-return step");
    s->add_option("--out", ta.out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) return app.exit(err);
        std::cerr << "error: " << err.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        cumcop::set_thread_count(static_cast<unsigned>(g.threads));
        if (*m) return run_measure(g, measure, c1, c2, alpha, closed);
        if (*e) return run_empirical(g, input, alpha, exact);
        if (*t) return run_test(g, input, stat, B, level);
        if (*p) return run_power(g, config, out, app.get_option("--seed")->count() > 0);
        if (*c) return run_catalog(g, out);
        if (*r) return run_rulkov(g, deltas, rp, alpha, prefix);
        if (*s) return run_tsa(g, ta);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}
