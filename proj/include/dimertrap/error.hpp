#pragma once

#include <stdexcept>
#include <string>

namespace dimertrap {

/// Invalid parameters or configuration (CLI exit code 1).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure: exceptional point, integrator blow-up, quadrature or fit
/// non-convergence (CLI exit code 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Monte Carlo denominator indistinguishable from zero (CLI exit code 3).
class SignCollapseError : public NumericalError {
public:
    SignCollapseError(const std::string& what, double time, double average_sign)
        : NumericalError(what), time_(time), average_sign_(average_sign) {}

    double time() const noexcept { return time_; }
    double average_sign() const noexcept { return average_sign_; }

private:
    double time_;
    double average_sign_;
};

}  // namespace dimertrap
