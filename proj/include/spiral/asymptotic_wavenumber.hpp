#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "errors.hpp"
#include "logscale.hpp"
#include "specfun.hpp"

namespace spiral {

/// Sign with which C_n enters the exponent. `printed` is the published
/// kappa(q) = (2/q) exp(-C_n/n^2 - gamma) exp(-pi/(2 n q)); `corrected` uses
/// exp(+C_n/n^2 - gamma), which follows from v0_in ~ -q (n^2 log r + C_n)/r
/// and is what the full numerical solve converges to.
enum class CnSign { printed, corrected };

inline const char* to_string(CnSign s) { return s == CnSign::printed ? "printed" : "corrected"; }

inline double cn_sign_factor(CnSign s) { return s == CnSign::printed ? -1.0 : 1.0; }

/// Closed-form selected wavenumber, kept in log space since it is
/// exponentially small in 1/q.
struct WavenumberFormula {
    int n = 1;
    double C_n = 0.0;
    double gamma_euler = euler_gamma;
    double q = 0.0;
    double log_kappa = 0.0;
    double mu_bar = 0.0;
    double kappa = 0.0;     ///< exp(log_kappa), or 0 when it underflows
    bool underflow = false;
    CnSign sign = CnSign::printed;

    LogValue kappa_log() const { return {log_kappa, 1}; }
};

inline void check_n_cn(const char* who, int n, double C_n)
{
    if (n < 1) throw DomainError(std::string(who) + ": n must be a positive integer");
    if (!std::isfinite(C_n)) throw DomainError(std::string(who) + ": C_n must be finite");
}

inline double mu_bar(int n, double C_n, CnSign sign = CnSign::printed)
{
    check_n_cn("mu_bar", n, C_n);
    return 2.0 * std::exp(cn_sign_factor(sign) * C_n / (double(n) * n) - euler_gamma);
}

/// (mu0, mu1) = (mu_bar/2, 3 mu_bar/2).
inline std::pair<double, double> mu_bracket(int n, double C_n, CnSign sign = CnSign::printed)
{
    const double m0 = 0.5 * mu_bar(n, C_n, sign);
    return {m0, 3.0 * m0};
}

inline WavenumberFormula kappa_asym(int n, double q, double C_n, CnSign sign = CnSign::printed)
{
    check_n_cn("kappa_asym", n, C_n);
    if (!(q > 0.0))
        throw DomainError("kappa_asym: q must be positive, got " + num(q) +
                          "; map negative q through (v, q) -> (-v, -q)");
    WavenumberFormula w;
    w.n = n;
    w.C_n = C_n;
    w.q = q;
    const double n2 = double(n) * n;
    w.sign = sign;
    w.log_kappa = std::log(2.0) - std::log(q) + cn_sign_factor(sign) * C_n / n2 - euler_gamma -
                  M_PI / (2.0 * n * q);
    w.mu_bar = mu_bar(n, C_n, sign);
    const LogValue lv{w.log_kappa, 1};
    w.underflow = lv.underflows();
    w.kappa = w.underflow ? 0.0 : lv.to_double();
    return w;
}

/// kappa for either sign of q: the selected wavenumber is even in q.
inline WavenumberFormula kappa_symmetric(int n, double q, double C_n, CnSign sign = CnSign::printed)
{
    auto w = kappa_asym(n, std::fabs(q), C_n, sign);
    w.q = q;
    return w;
}

struct MatchingGeometry {
    int n = 1;
    double q = 0.0;
    double mu = 0.0;
    double rho = 0.0;
    double log_r0 = 0.0;
    double alpha = 0.0;
    double log_eps = 0.0; ///< log(mu) - pi/(2 n q)
    double window_lo = 0.0, window_hi = 0.0;
};

/// Constants of the admissible window q |log(e0 q/sqrt 2)| < rho < rho0.
/// Only their existence is asserted analytically; both default to 1.
struct MatchingWindow {
    double e0 = 1.0;
    double rho0 = 1.0;
};

inline MatchingGeometry matching_geometry(int n, double q, double mu, const MatchingWindow& win = {})
{
    if (n < 1) throw DomainError("matching_geometry: n must be a positive integer");
    if (!(q > 0.0 && q < 1.0))
        throw DomainError("matching_geometry: q must lie in (0, 1), got " + num(q));
    if (!(mu > 0.0)) throw DomainError("matching_geometry: mu must be positive");
    MatchingGeometry g;
    g.n = n;
    g.q = q;
    g.mu = mu;
    g.rho = std::cbrt(q / std::fabs(std::log(q)));
    g.window_lo = q * std::fabs(std::log(win.e0 * q / std::sqrt(2.0)));
    g.window_hi = win.rho0;
    if (!(g.window_lo < g.rho && g.rho < g.window_hi))
        throw DomainError("matching_geometry: rho=" + num(g.rho) + " outside the window (" +
                          num(g.window_lo) + ", " + num(g.window_hi) + ") at q=" + num(q) +
                          "; q must be smaller");
    const double ls2 = 0.5 * std::log(2.0);
    g.log_r0 = g.rho / q - ls2;
    g.alpha = 1.0 - (2.0 * n * g.rho / M_PI) * (1.0 - q * ls2 / g.rho) /
                        (1.0 - 2.0 * n * q * std::log(mu) / M_PI);
    g.log_eps = std::log(mu) - M_PI / (2.0 * n * q);
    if (!(g.alpha > 0.0 && g.alpha < 1.0))
        throw DomainError("matching_geometry: alpha=" + num(g.alpha) + " outside (0, 1) at q=" + num(q));
    return g;
}

/// Leading bracket of the inner/outer phase matching,
///   C_n + n^2 log(mu/2) - n theta_{0,nq}/q.
inline double leading_matching_residual(double mu, int n, double q, double C_n)
{
    check_n_cn("leading_matching_residual", n, C_n);
    if (!(q > 0.0)) throw DomainError("leading_matching_residual: q must be positive");
    if (!(mu > 0.0)) throw DomainError("leading_matching_residual: mu must be positive");
    const double theta = gamma_arg(0, n * q).theta;
    return C_n + double(n) * n * std::log(mu / 2.0) - n * theta / q;
}

/// Root of leading_matching_residual in mu, found by bisection in log mu on
/// a bracket widened from (mu0, mu1) until it changes sign.
inline double matching_root(int n, double q, double C_n, double tol = 1e-15)
{
    auto [lo, hi] = mu_bracket(n, C_n);
    double a = std::log(lo), b = std::log(hi);
    auto g = [&](double lm) { return leading_matching_residual(std::exp(lm), n, q, C_n); };
    double ga = g(a), gb = g(b);
    for (int i = 0; i < 60 && ga * gb > 0; ++i) {
        // residual increases with mu
        if (ga > 0) a -= 1.0;
        else b += 1.0;
        ga = g(a);
        gb = g(b);
    }
    if (ga * gb > 0) throw ConvergenceError("matching_root: no sign change found");
    while (b - a > tol * std::max(1.0, std::fabs(a))) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if (gm == 0.0) return std::exp(m);
        if ((gm > 0) == (gb > 0)) {
            b = m;
            gb = gm;
        } else {
            a = m;
            ga = gm;
        }
    }
    return std::exp(0.5 * (a + b));
}

} // namespace spiral
