#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace cumcop {

/// Tsallis order. Any positive real is accepted; the value 1 is stored as the
/// Shannon limit so that `log_alpha` falls back to the natural logarithm.
class Alpha {
public:
    explicit Alpha(double value) : value_(value) {
        if (!(value > 0.0) || !std::isfinite(value))
            throw domain_error("alpha must be a finite positive number, got " + std::to_string(value));
    }

    static Alpha shannon() { return Alpha(1.0); }

    double value() const noexcept { return value_; }
    bool is_shannon() const noexcept { return value_ == 1.0; }

    friend bool operator==(const Alpha&, const Alpha&) = default;

private:
    double value_;
};

/// Deformed logarithm (r^(a-1) - 1) / (a - 1); ln(r) in the Shannon limit.
/// r = 0 yields -inf for a <= 1 and -1/(a-1) for a > 1.
inline double log_alpha(double r, Alpha a) noexcept {
    if (a.is_shannon()) return std::log(r);
    const double e = a.value() - 1.0;
    return std::expm1(e * std::log(r)) / e;
}

/// h(r) = -r log_a(r) with the continuous extension h(0) = 0.
inline double neg_r_log_alpha(double r, Alpha a) noexcept {
    if (r <= 0.0) return 0.0;
    if (a.is_shannon()) return -r * std::log(r);
    return (r - std::pow(r, a.value())) / (a.value() - 1.0);
}

/// Maximum of h(r) = -r log_a(r) over [0,1]: at r* = a^(1/(1-a)) it equals
/// r*/a = a^(a/(1-a)). The unit cube has volume one, so this also bounds the
/// cumulative copula Tsallis entropy.
inline double entropy_upper_bound(Alpha a) noexcept {
    if (a.is_shannon()) return std::exp(-1.0);
    return std::pow(a.value(), a.value() / (1.0 - a.value()));
}

}  // namespace cumcop
