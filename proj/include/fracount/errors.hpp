#pragma once

#include <stdexcept>
#include <string>

namespace fracount {

// Two families: bad input (caller's fault, CLI exit code 2) and numeric
// failure (evaluation could not meet its contract, CLI exit code 3).

class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested capability outside what the library supports (caps, regimes).
class UnsupportedError : public InvalidParameter {
public:
    using InvalidParameter::InvalidParameter;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public NumericError {
public:
    using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, double last_term_magnitude, int terms)
        : NumericError(what), last_term_(last_term_magnitude), terms_(terms) {}

    double last_term() const noexcept { return last_term_; }
    int terms() const noexcept { return terms_; }

private:
    double last_term_;
    int terms_;
};

/// Cancellation in an alternating sum ate the requested relative accuracy.
class PrecisionLossError : public NumericError {
public:
    PrecisionLossError(const std::string& what, double error_estimate, double value)
        : NumericError(what), error_estimate_(error_estimate), value_(value) {}

    double error_estimate() const noexcept { return error_estimate_; }
    double value() const noexcept { return value_; }

private:
    double error_estimate_;
    double value_;
};

class RangeError : public NumericError {
public:
    using NumericError::NumericError;
};

class IntegrationError : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateDistributionError : public NumericError {
public:
    using NumericError::NumericError;
};

class AsymptoticSeriesError : public NumericError {
public:
    using NumericError::NumericError;
};

class InsufficientDataError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace fracount
