#pragma once

#include <stdexcept>
#include <string>

namespace cumcop {

/// Base for every error raised by the library. Callers that only care about
/// "something went wrong with the inputs" can catch this one type.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain of the family or operation.
class domain_error : public error {
public:
    using error::error;
};

/// Two operands disagree on dimension.
class dimension_error : public error {
public:
    using error::error;
};

/// The requested capability does not exist for this copula (CDF of a
/// Gaussian copula, sampler for an empirical copula, ...).
class unsupported_error : public error {
public:
    using error::error;
};

/// An integrand produced NaN or infinity at an evaluation node. The measure is
/// divergent (or undefined) for the given inputs.
class non_finite_integrand : public error {
public:
    using error::error;
};

/// Malformed or unusable input data (CSV contents, dates, NaN observations).
class data_error : public error {
public:
    using error::error;
};

}  // namespace cumcop
