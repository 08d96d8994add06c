#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace spiral {

/// Physical CGL parameters for a reduced solution (q, k) at a chosen alpha.
struct PhysicalTriple {
    double alpha = 0.0, beta = 0.0;
    double q = 0.0, k = 0.0;
    double Omega_hat = 0.0; ///< q (1 - k^2)
    double Omega = 0.0;
    double k_star = 0.0;
    double C = 1.0;         ///< wave-train amplitude sqrt(1 - k_*^2)
    double a = 1.0;         ///< radial scale: A(t, a r) <-> reduced profile at r
    double delta = 1.0;     ///< amplitude scale: f = delta * |A|
    std::vector<std::string> warnings;
};

inline double q_from_alpha_beta(double alpha, double beta)
{
    const double d = 1.0 + alpha * beta;
    if (!(std::fabs(d) > 1e-300)) throw DomainError("q_from_alpha_beta: 1 + alpha beta vanishes");
    return (beta - alpha) / d;
}

inline double beta_from_alpha_q(double alpha, double q)
{
    const double d = 1.0 - alpha * q;
    if (!(std::fabs(d) > 1e-14)) throw DomainError("beta_from_alpha_q: 1 - alpha q vanishes");
    return (alpha + q) / d;
}

inline PhysicalTriple physical_from_reduced(double alpha, double q, double k)
{
    if (!std::isfinite(alpha) || !std::isfinite(q) || !std::isfinite(k))
        throw DomainError("physical_from_reduced: non-finite input");
    if (!(std::fabs(k) < 1.0)) throw DomainError("physical_from_reduced: |k| must be below 1");
    PhysicalTriple t;
    t.alpha = alpha;
    t.q = q;
    t.k = k;
    t.beta = beta_from_alpha_q(alpha, q);
    t.Omega_hat = q * (1 - k * k);
    const double D = 1.0 - alpha * t.Omega_hat;
    if (!(D > 0.0))
        throw DomainError("physical_from_reduced: 1 - alpha q (1 - k^2) = " + num(D) + " must be positive");
    t.Omega = -(alpha + t.Omega_hat) / D;
    t.k_star = k / std::sqrt(D);
    const double om = 1.0 - t.Omega * alpha, ab = 1.0 + alpha * t.beta;
    if (!(om > 0.0)) throw DomainError("physical_from_reduced: 1 - Omega alpha must be positive");
    if (!(ab > 0.0)) throw DomainError("physical_from_reduced: 1 + alpha beta must be positive");
    if (!(t.k_star < 1.0)) throw DomainError("physical_from_reduced: k_* = " + num(t.k_star) + " >= 1");
    t.a = std::sqrt((1 + alpha * alpha) / om);
    t.delta = std::sqrt(ab / om);
    t.C = std::sqrt(1 - t.k_star * t.k_star);
    if (!(std::fabs(alpha - t.beta) < 1.0))
        t.warnings.push_back("|alpha - beta| = " + num(std::fabs(alpha - t.beta)) +
                             " >= 1: outside the standing assumption, formulas still evaluated");
    return t;
}

/// Inverse map from (alpha, beta, k_*) back to (q, k).
inline std::pair<double, double> reduced_from_physical(double alpha, double beta, double k_star)
{
    const double q = q_from_alpha_beta(alpha, beta);
    // k_*^2 (1 - alpha q (1 - k^2)) = k^2
    const double den = 1.0 - alpha * q * k_star * k_star;
    if (!(den > 0.0)) throw DomainError("reduced_from_physical: 1 - alpha q k_*^2 must be positive");
    const double k2 = k_star * k_star * (1 - alpha * q) / den;
    if (!(k2 >= 0.0 && k2 < 1.0)) throw DomainError("reduced_from_physical: no admissible k");
    return {q, std::copysign(std::sqrt(k2), k_star)};
}

/// (Omega + beta - k_*^2 (beta - alpha), C^2 - (1 - k_*^2)).
inline std::pair<double, double> dispersion_check(double alpha, double beta, double Omega, double k_star,
                                                  double C)
{
    return {Omega + beta - k_star * k_star * (beta - alpha), C * C - (1 - k_star * k_star)};
}

inline std::pair<double, double> dispersion_check(double alpha, double beta, double Omega, double k_star)
{
    if (!(std::fabs(k_star) <= 1.0)) throw DomainError("dispersion_check: |k_*| must be at most 1");
    return dispersion_check(alpha, beta, Omega, k_star, std::sqrt(1 - k_star * k_star));
}

/// Residuals of (1 - k_*^2) = (1 - k^2)(1 - Omega alpha)/(1 + alpha beta) and
/// (1 - Omega alpha)(1 - alpha q (1 - k^2)) = 1 + alpha^2.
inline std::pair<double, double> reduction_identities(const PhysicalTriple& t)
{
    const double om = 1 - t.Omega * t.alpha;
    const double r1 = (1 - t.k_star * t.k_star) - (1 - t.k * t.k) * om / (1 + t.alpha * t.beta);
    const double r2 = om * (1 - t.alpha * t.Omega_hat) - (1 + t.alpha * t.alpha);
    return {r1, r2};
}

} // namespace spiral
