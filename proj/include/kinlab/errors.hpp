#pragma once

#include <stdexcept>
#include <string>

namespace kinlab {

/// Invalid configuration or usage (CLI exit code 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Mathematically invalid argument to an operation.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure at run time: CFL violation, majorant violation (CLI exit code 2).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a certificate is requested for a problem whose control
/// functional does not clear the configured threshold (CLI exit code 3).
struct ControlNotSatisfied : std::runtime_error {
    double kappa_hat;
    explicit ControlNotSatisfied(const std::string& what, double kappa)
        : std::runtime_error(what), kappa_hat(kappa) {}
};

}  // namespace kinlab
