#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "rank_matrix.hpp"

namespace cumcop {

enum class Family {
    product,
    frechet_upper,
    frechet_lower,
    clayton,
    gumbel,
    frank,
    fgm,
    marshall_olkin,
    cuadras_auge,
    gumbel_barnett,
    gaussian,
    student_t,
    counterexample,
    empirical,
    wam,
    wgm,
};

inline std::string_view family_name(Family f) {
    switch (f) {
        case Family::product: return "product";
        case Family::frechet_upper: return "frechet-upper";
        case Family::frechet_lower: return "frechet-lower";
        case Family::clayton: return "clayton";
        case Family::gumbel: return "gumbel";
        case Family::frank: return "frank";
        case Family::fgm: return "fgm";
        case Family::marshall_olkin: return "marshall-olkin";
        case Family::cuadras_auge: return "cuadras-auge";
        case Family::gumbel_barnett: return "gumbel-barnett";
        case Family::gaussian: return "gaussian";
        case Family::student_t: return "student-t";
        case Family::counterexample: return "counterexample";
        case Family::empirical: return "empirical";
        case Family::wam: return "wam";
        case Family::wgm: return "wgm";
    }
    return "?";
}

inline Family parse_family(std::string_view s) {
    static constexpr Family all[] = {
        Family::product, Family::frechet_upper, Family::frechet_lower, Family::clayton, Family::gumbel,
        Family::frank, Family::fgm, Family::marshall_olkin, Family::cuadras_auge, Family::gumbel_barnett,
        Family::gaussian, Family::student_t, Family::counterexample, Family::empirical, Family::wam, Family::wgm,
    };
    for (Family f : all)
        if (family_name(f) == s) return f;
    if (s == "pi" || s == "independence") return Family::product;
    if (s == "M" || s == "upper") return Family::frechet_upper;
    if (s == "W" || s == "lower") return Family::frechet_lower;
    if (s == "gumbel-hougaard") return Family::gumbel;
    if (s == "normal") return Family::gaussian;
    if (s == "t") return Family::student_t;
    throw domain_error("unknown copula family '" + std::string(s) + "'");
}

class CopulaSpec;

namespace fam {
struct Product {};
struct FrechetUpper {};
struct FrechetLower {};
struct Clayton { double theta; };
struct Gumbel { double theta; };
struct Frank { double theta; };
struct FGM { double theta; };
struct MarshallOlkin { double p, q; };
struct CuadrasAuge { std::vector<double> gamma; };
struct GumbelBarnett { double phi; };
struct Gaussian { double rho; };
struct StudentT { double rho, nu; };
struct Counterexample {};
struct Empirical { std::shared_ptr<const EmpiricalIndex> index; };
struct WAM { std::shared_ptr<const std::vector<CopulaSpec>> children; std::vector<double> weights; };
struct WGM { std::shared_ptr<const std::vector<CopulaSpec>> children; std::vector<double> exponents; };
}  // namespace fam

/// An immutable d-dimensional copula: a parametric family, an empirical
/// copula, or a weighted combination of other copulas. Cheap to copy.
class CopulaSpec {
public:
    using Variant = std::variant<fam::Product, fam::FrechetUpper, fam::FrechetLower, fam::Clayton, fam::Gumbel,
                                 fam::Frank, fam::FGM, fam::MarshallOlkin, fam::CuadrasAuge, fam::GumbelBarnett,
                                 fam::Gaussian, fam::StudentT, fam::Counterexample, fam::Empirical, fam::WAM, fam::WGM>;

    static CopulaSpec product(std::size_t d = 2) { return {check_d(d), fam::Product{}}; }
    static CopulaSpec frechet_upper(std::size_t d = 2) { return {check_d(d), fam::FrechetUpper{}}; }
    static CopulaSpec frechet_lower() { return {2, fam::FrechetLower{}}; }

    static CopulaSpec clayton(double theta, std::size_t d = 2) {
        check_d(d);
        if (!std::isfinite(theta) || theta < -1.0 || theta == 0.0)
            throw domain_error("Clayton theta must lie in [-1, inf) without 0");
        if (theta < 0.0 && theta < -1.0 / static_cast<double>(d - 1))
            throw domain_error("Clayton theta < -1/(d-1) is not a copula in dimension " + std::to_string(d));
        return {d, fam::Clayton{theta}};
    }
    static CopulaSpec gumbel(double theta, std::size_t d = 2) {
        check_d(d);
        if (!std::isfinite(theta) || theta < 1.0) throw domain_error("Gumbel-Hougaard theta must be >= 1");
        return {d, fam::Gumbel{theta}};
    }
    static CopulaSpec frank(double theta, std::size_t d = 2) {
        check_d(d);
        if (!std::isfinite(theta) || theta == 0.0) throw domain_error("Frank theta must be a nonzero real");
        if (theta < 0.0 && d > 2) throw domain_error("Frank theta < 0 is only a copula for d = 2");
        return {d, fam::Frank{theta}};
    }
    static CopulaSpec fgm(double theta) {
        if (!(theta >= -1.0 && theta <= 1.0)) throw domain_error("FGM theta must lie in [-1, 1]");
        return {2, fam::FGM{theta}};
    }
    static CopulaSpec marshall_olkin(double p, double q) {
        if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
            throw domain_error("Marshall-Olkin p and q must lie in [0, 1]");
        return {2, fam::MarshallOlkin{p, q}};
    }
    /// prod_i u_[i]^gamma_i over the ascending order statistics. Accepted when
    /// gamma_1 = 1 >= gamma_2 >= ... >= gamma_d >= 0, which includes every
    /// M^g Pi^(1-g) mixture.
    static CopulaSpec cuadras_auge(std::vector<double> gamma) {
        const std::size_t d = check_d(gamma.size());
        if (gamma[0] != 1.0) throw domain_error("Cuadras-Auge gamma_1 must equal 1");
        for (std::size_t i = 1; i < d; ++i)
            if (!(gamma[i] >= 0.0 && gamma[i] <= gamma[i - 1]))
                throw domain_error("Cuadras-Auge exponents must be nonincreasing in [0, 1]");
        return {d, fam::CuadrasAuge{std::move(gamma)}};
    }
    static CopulaSpec gumbel_barnett(double phi) {
        if (!(phi >= 0.0 && phi <= 1.0)) throw domain_error("Gumbel-Barnett phi must lie in [0, 1]");
        return {2, fam::GumbelBarnett{phi}};
    }
    static CopulaSpec gaussian(double rho) {
        if (!(rho > -1.0 && rho < 1.0)) throw domain_error("Gaussian rho must lie in (-1, 1)");
        return {2, fam::Gaussian{rho}};
    }
    static CopulaSpec student_t(double rho, double nu = 4.0) {
        if (!(rho > -1.0 && rho < 1.0)) throw domain_error("Student-t rho must lie in (-1, 1)");
        if (!(nu > 0.0) || !std::isfinite(nu)) throw domain_error("Student-t nu must be positive");
        return {2, fam::StudentT{rho, nu}};
    }
    static CopulaSpec counterexample() { return {2, fam::Counterexample{}}; }
    static CopulaSpec empirical(RankMatrix r) {
        const std::size_t d = r.d();
        return {d, fam::Empirical{std::make_shared<const EmpiricalIndex>(std::move(r))}};
    }
    static CopulaSpec wam(std::vector<CopulaSpec> children, std::vector<double> weights) {
        const std::size_t d = check_mixture(children, weights, "W.A.M.");
        return {d, fam::WAM{std::make_shared<const std::vector<CopulaSpec>>(std::move(children)), std::move(weights)}};
    }
    /// prod_j C_j^q_j. Accepted for any valid exponents; a geometric mean of
    /// copulas need not be a copula, see possibly_invalid().
    static CopulaSpec wgm(std::vector<CopulaSpec> children, std::vector<double> exponents) {
        const std::size_t d = check_mixture(children, exponents, "W.G.M.");
        return {d, fam::WGM{std::make_shared<const std::vector<CopulaSpec>>(std::move(children)), std::move(exponents)}};
    }

    std::size_t dimension() const noexcept { return d_; }
    const Variant& variant() const noexcept { return v_; }
    Family family() const noexcept { return static_cast<Family>(v_.index()); }

    /// Scalar parameters in a fixed order per family (empty for parameter-free
    /// families, combinators and the empirical copula).
    std::vector<double> params() const {
        return std::visit(
            [](const auto& f) -> std::vector<double> {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, fam::Clayton> || std::is_same_v<T, fam::Gumbel> ||
                              std::is_same_v<T, fam::Frank> || std::is_same_v<T, fam::FGM>)
                    return {f.theta};
                else if constexpr (std::is_same_v<T, fam::MarshallOlkin>)
                    return {f.p, f.q};
                else if constexpr (std::is_same_v<T, fam::CuadrasAuge>)
                    return f.gamma;
                else if constexpr (std::is_same_v<T, fam::GumbelBarnett>)
                    return {f.phi};
                else if constexpr (std::is_same_v<T, fam::Gaussian>)
                    return {f.rho};
                else if constexpr (std::is_same_v<T, fam::StudentT>)
                    return {f.rho, f.nu};
                else
                    return {};
            },
            v_);
    }

    /// Short human-readable description, e.g. "clayton(theta=1.5, d=2)".
    std::string describe() const {
        std::ostringstream os;
        os << family_name(family()) << "(";
        const auto p = params();
        for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
        if (!p.empty()) os << ";";
        os << "d=" << d_ << ")";
        return os.str();
    }

    bool has_cdf() const noexcept {
        return std::visit(
            [](const auto& f) -> bool {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, fam::Gaussian> || std::is_same_v<T, fam::StudentT>)
                    return false;
                else if constexpr (std::is_same_v<T, fam::WAM> || std::is_same_v<T, fam::WGM>)
                    return std::all_of(f.children->begin(), f.children->end(), [](const CopulaSpec& c) { return c.has_cdf(); });
                else
                    return true;
            },
            v_);
    }

    /// True for a W.G.M. that is not a recognised valid case (a two-component
    /// mixture of M and Pi, which is a Cuadras-Auge copula).
    bool possibly_invalid() const {
        if (const auto* g = std::get_if<fam::WGM>(&v_)) {
            bool known = true;
            for (const auto& c : *g->children) {
                const Family f = c.family();
                known = known && (f == Family::frechet_upper || f == Family::product);
            }
            return !known;
        }
        if (const auto* a = std::get_if<fam::WAM>(&v_))
            return std::any_of(a->children->begin(), a->children->end(), [](const CopulaSpec& c) { return c.possibly_invalid(); });
        return false;
    }

    /// C(u) without argument checks; u must hold d() coordinates in [0,1].
    double cdf(const double* u) const;

private:
    CopulaSpec(std::size_t d, Variant v) : d_(d), v_(std::move(v)) {}

    static std::size_t check_d(std::size_t d) {
        if (d < 2) throw dimension_error("copula dimension must be at least 2");
        return d;
    }

    static std::size_t check_mixture(const std::vector<CopulaSpec>& children, const std::vector<double>& w, const char* what) {
        if (children.empty()) throw domain_error(std::string(what) + " needs at least one copula");
        if (children.size() != w.size()) throw domain_error(std::string(what) + " needs one weight per copula");
        const std::size_t d = children.front().dimension();
        double s = 0.0;
        for (std::size_t j = 0; j < children.size(); ++j) {
            if (children[j].dimension() != d) throw dimension_error(std::string(what) + " children differ in dimension");
            if (!(w[j] >= 0.0) || !std::isfinite(w[j])) throw domain_error(std::string(what) + " weights must be nonnegative");
            s += w[j];
        }
        if (std::abs(s - 1.0) > 1e-12) throw domain_error(std::string(what) + " weights must sum to 1");
        return d;
    }

    std::size_t d_;
    Variant v_;
};

namespace detail {

inline double min_of(const double* u, std::size_t d) {
    double m = u[0];
    for (std::size_t k = 1; k < d; ++k) m = std::min(m, u[k]);
    return m;
}

inline double frank_cdf(double theta, const double* u, std::size_t d) {
    // -1/theta * log(1 + prod(e^{-theta u}-1) / (e^{-theta}-1)^{d-1})
    const double den = std::expm1(-theta);
    double ratio = 1.0;
    for (std::size_t k = 0; k < d; ++k) ratio *= std::expm1(-theta * u[k]) / den;
    return -std::log1p(ratio * den) / theta;
}

}  // namespace detail

inline double CopulaSpec::cdf(const double* u) const {
    const std::size_t d = d_;
    for (std::size_t k = 0; k < d; ++k)
        if (u[k] <= 0.0) return 0.0;
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, fam::Product>) {
                double p = 1.0;
                for (std::size_t k = 0; k < d; ++k) p *= u[k];
                return p;
            } else if constexpr (std::is_same_v<T, fam::FrechetUpper>) {
                return detail::min_of(u, d);
            } else if constexpr (std::is_same_v<T, fam::FrechetLower>) {
                return std::max(u[0] + u[1] - 1.0, 0.0);
            } else if constexpr (std::is_same_v<T, fam::Clayton>) {
                double s = 1.0 - static_cast<double>(d);
                for (std::size_t k = 0; k < d; ++k) s += std::pow(u[k], -f.theta);
                if (s <= 0.0) return 0.0;
                return std::pow(s, -1.0 / f.theta);
            } else if constexpr (std::is_same_v<T, fam::Gumbel>) {
                double s = 0.0;
                for (std::size_t k = 0; k < d; ++k) s += std::pow(-std::log(u[k]), f.theta);
                return std::exp(-std::pow(s, 1.0 / f.theta));
            } else if constexpr (std::is_same_v<T, fam::Frank>) {
                return detail::frank_cdf(f.theta, u, d);
            } else if constexpr (std::is_same_v<T, fam::FGM>) {
                return u[0] * u[1] * (1.0 + f.theta * (1.0 - u[0]) * (1.0 - u[1]));
            } else if constexpr (std::is_same_v<T, fam::MarshallOlkin>) {
                return std::min(std::pow(u[0], 1.0 - f.p) * u[1], u[0] * std::pow(u[1], 1.0 - f.q));
            } else if constexpr (std::is_same_v<T, fam::CuadrasAuge>) {
                double sorted[16];
                std::vector<double> heap;
                double* s = sorted;
                if (d > 16) {
                    heap.resize(d);
                    s = heap.data();
                }
                std::copy(u, u + d, s);
                std::sort(s, s + d);
                double p = 1.0;
                for (std::size_t k = 0; k < d; ++k) p *= f.gamma[k] == 0.0 ? 1.0 : std::pow(s[k], f.gamma[k]);
                return p;
            } else if constexpr (std::is_same_v<T, fam::GumbelBarnett>) {
                return u[0] * u[1] * std::exp(-f.phi * std::log(u[0]) * std::log(u[1]));
            } else if constexpr (std::is_same_v<T, fam::Gaussian> || std::is_same_v<T, fam::StudentT>) {
                throw unsupported_error(std::string(family_name(family())) + " copula has no CDF evaluator (sampling only)");
            } else if constexpr (std::is_same_v<T, fam::Counterexample>) {
                const double a = 1.0 / u[0] - 1.0, b = 1.0 / u[1] - 1.0;
                return 1.0 / (1.0 + std::sqrt(a * a + b * b));
            } else if constexpr (std::is_same_v<T, fam::Empirical>) {
                return (*f.index)(u);
            } else if constexpr (std::is_same_v<T, fam::WAM>) {
                double s = 0.0;
                for (std::size_t j = 0; j < f.weights.size(); ++j)
                    if (f.weights[j] > 0.0) s += f.weights[j] * (*f.children)[j].cdf(u);
                return s;
            } else {
                double p = 1.0;
                for (std::size_t j = 0; j < f.exponents.size(); ++j) {
                    if (f.exponents[j] == 0.0) continue;
                    const double c = (*f.children)[j].cdf(u);
                    if (c <= 0.0) return 0.0;
                    p *= std::pow(c, f.exponents[j]);
                }
                return p;
            }
        },
        v_);
}

/// C(u) with argument checks: u must have d coordinates in [0,1].
inline double eval_cdf(const CopulaSpec& c, std::span<const double> u) {
    if (u.size() != c.dimension())
        throw dimension_error("point has " + std::to_string(u.size()) + " coordinates, copula has " + std::to_string(c.dimension()));
    for (double x : u)
        if (!(x >= 0.0 && x <= 1.0)) throw domain_error("copula argument outside [0,1]");
    return c.cdf(u.data());
}

enum class PlodOrder { c1_below, c1_above, incomparable };

inline std::string_view plod_name(PlodOrder o) {
    switch (o) {
        case PlodOrder::c1_below: return "c1_below";
        case PlodOrder::c1_above: return "c1_above";
        case PlodOrder::incomparable: return "incomparable";
    }
    return "?";
}

/// Sign of C1 - C2 on the open lattice {i/(m+1)}^d. Equal copulas (no sign
/// beyond 1e-12 anywhere) report c1_below, since C1 <= C2 holds.
inline PlodOrder plod_compare(const CopulaSpec& c1, const CopulaSpec& c2, std::size_t grid_resolution) {
    if (c1.dimension() != c2.dimension()) throw dimension_error("PLOD comparison needs equal dimensions");
    if (grid_resolution < 2) throw domain_error("grid resolution must be at least 2");
    const std::size_t d = c1.dimension(), m = grid_resolution;
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) {
        if (total > (std::size_t{1} << 40) / m) throw domain_error("PLOD lattice too large");
        total *= m;
    }
    bool below = false, above = false;
    std::vector<double> u(d);
    for (std::size_t i = 0; i < total && !(below && above); ++i) {
        std::size_t r = i;
        for (std::size_t k = 0; k < d; ++k) {
            u[k] = static_cast<double>(r % m + 1) / static_cast<double>(m + 1);
            r /= m;
        }
        const double diff = c1.cdf(u.data()) - c2.cdf(u.data());
        if (diff > 1e-12) above = true;
        if (diff < -1e-12) below = true;
    }
    if (below && above) return PlodOrder::incomparable;
    return above ? PlodOrder::c1_above : PlodOrder::c1_below;
}

}  // namespace cumcop
