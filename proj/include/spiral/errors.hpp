#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace spiral {

/// Short number formatting for error messages.
inline std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/// Invalid input: argument outside the admitted domain.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Bad configuration (grid, radii, budgets).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iteration, series or quadrature failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation at (or too close to) a pole or zero.
class SingularityError : public DomainError {
public:
    SingularityError(const std::string& what, double lo, double hi)
        : DomainError(what), bracket_lo(lo), bracket_hi(hi) {}
    double bracket_lo;
    double bracket_hi;
};

} // namespace spiral
