#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "specfun.hpp"

namespace spiral {

/// Outer-region parameters. q may be negative: the outer pair then follows
/// from the (v, q) -> (-v, -q) symmetry.
struct OuterParams {
    int n = 1;
    double q = 0.0;
    double k = 0.0;
    double log_eps = -std::numeric_limits<double>::infinity(); ///< log(k |q|)
    double nu = 0.0;                                         ///< n |q|

    OuterParams() = default;
    OuterParams(int n_, double q_, double k_) : n(n_), q(q_), k(k_)
    {
        if (n < 1) throw DomainError("OuterParams: n must be a positive integer");
        if (!(k >= 0.0 && k < 1.0)) throw DomainError("OuterParams: k must lie in [0, 1)");
        nu = n * std::fabs(q);
        log_eps = std::log(k) + std::log(std::fabs(q));
    }
    double eps() const { return std::exp(log_eps); }
    double sign() const { return q < 0 ? -1.0 : 1.0; }
};

struct OuterEval {
    double R = 0.0;
    double V0 = 0.0, dV0 = 0.0, ddV0 = 0.0;
    double F0 = 0.0, dF0 = 0.0, ddF0 = 0.0;
};

struct OuterOptions {
    bool allow_below_validated = false;
    SpecfunOptions specfun{};
};

/// Lower edge 2 e^2 e^{-pi/(2 nu)} of the range where K_{i nu} > 0, K' < 0, K'' > 0.
inline double validated_min_R(double nu)
{
    if (nu <= 0.0) return 0.0;
    return 2.0 * std::exp(2.0 - M_PI / (2.0 * nu));
}

/// V0 = K'_{i nu}/K_{i nu} with R-derivatives from the Riccati relation.
inline OuterEval v0_of_R(const OuterParams& p, double R, const OuterOptions& opt = {})
{
    if (!(R > 0.0)) throw DomainError("v0_of_R: R must be positive");
    const double nu = p.nu;
    if (!opt.allow_below_validated && R < validated_min_R(nu))
        throw DomainError("v0_of_R: R=" + num(R) + " below validated range " +
                          num(validated_min_R(nu)) + " (K_{i nu} oscillates there)");
    OuterEval e;
    e.R = R;
    e.V0 = k_imag_log_derivative(nu, R, opt.specfun);
    if (!std::isfinite(e.V0) || std::fabs(e.V0) * R > 1e12) {
        // zero of K: leading small-R form vanishes at nu log(R/2) - theta0 = -m pi
        const double th = gamma_arg(0, nu).theta;
        const double m = std::round(-(nu * std::log(R / 2) - th) / M_PI);
        const double Rz = 2 * std::exp((th - m * M_PI) / nu);
        throw SingularityError("v0_of_R: K_{i nu} vanishes near R=" + num(Rz),
                               Rz * std::exp(-0.5 / nu), Rz * std::exp(0.5 / nu));
    }
    const double V = e.V0;
    e.dV0 = 1.0 - V / R - V * V - nu * nu / (R * R);
    e.ddV0 = -e.dV0 / R + V / (R * R) - 2.0 * V * e.dV0 + 2.0 * nu * nu / (R * R * R);
    return e;
}

/// F0 = sqrt(1 - k^2 V0^2 - eps^2 n^2 / R^2), filled into e together with derivatives.
inline double f0_of_R(const OuterParams& p, OuterEval& e)
{
    const double k2 = p.k * p.k;
    const double en2 = std::exp(2.0 * (p.log_eps - std::log(e.R))) * p.n * p.n; // eps^2 n^2 / R^2
    const double rad = 1.0 - k2 * e.V0 * e.V0 - en2;
    if (!(rad >= 0.0))
        throw DomainError("f0_of_R: negative radicand " + num(rad) + " at R=" +
                          num(e.R));
    e.F0 = std::sqrt(rad);
    const double R = e.R;
    // 2 F F' = -2 k^2 V V' + 2 en2 / R
    e.dF0 = (-k2 * e.V0 * e.dV0 + en2 / R) / e.F0;
    e.ddF0 = (-k2 * (e.dV0 * e.dV0 + e.V0 * e.ddV0) - 3.0 * en2 / (R * R) - e.dF0 * e.dF0) / e.F0;
    return e.F0;
}

inline OuterEval outer_eval(const OuterParams& p, double R, const OuterOptions& opt = {})
{
    auto e = v0_of_R(p, R, opt);
    f0_of_R(p, e);
    return e;
}

/// Outer pair in the original radius, with first and second r-derivatives.
struct OuterPoint {
    double r = 0.0, R = 0.0;
    double v = 0.0, dv = 0.0, ddv = 0.0;
    double f = 0.0, df = 0.0, ddf = 0.0;
};

inline OuterPoint outer_at(const OuterParams& p, double r, const OuterOptions& opt = {})
{
    if (!(r > 0.0)) throw DomainError("outer_at: r must be positive");
    const double R = std::exp(p.log_eps + std::log(r));
    const auto e = outer_eval(p, R, opt);
    const double eps = p.eps(), s = p.sign();
    OuterPoint o;
    o.r = r;
    o.R = R;
    o.v = s * p.k * e.V0;
    o.dv = s * p.k * eps * e.dV0;
    o.ddv = s * p.k * eps * eps * e.ddV0;
    o.f = e.F0;
    o.df = eps * e.dF0;
    o.ddf = eps * eps * e.ddF0;
    return o;
}

inline double v_out(const OuterParams& p, double r, const OuterOptions& opt = {})
{
    if (!(r > 0.0)) throw DomainError("v_out: r must be positive");
    return p.sign() * p.k * v0_of_R(p, std::exp(p.log_eps + std::log(r)), opt).V0;
}
inline double f_out(const OuterParams& p, double r, const OuterOptions& opt = {})
{
    return outer_at(p, r, opt).f;
}

/// Antiderivative of v_out: (sign/|q|) log K_{i nu}(k|q| r), up to a constant.
inline double v_out_primitive(const OuterParams& p, double r, const OuterOptions& opt = {})
{
    const double R = std::exp(p.log_eps + std::log(r));
    return p.sign() / std::fabs(p.q) * log_k_imag(p.nu, R, opt.specfun);
}

struct CotanEval {
    double value = 0.0;
    double error_band = 0.0; ///< O(q^2) relative band times |value|
    bool near_pole = false;
};

/// Small-argument matching form -(n/r) tan(nq log r + nq log(mu/2) - theta_{0,nq}).
inline CotanEval v_out_cotan(const OuterParams& p, double r, double pole_delta = 1e-3)
{
    const double R = std::exp(p.log_eps + std::log(r));
    const double nu = p.nu;
    const double lo = 2.0 * std::exp(-M_PI / (2.0 * nu)), hi = nu * nu;
    if (R < lo * (1 - 1e-12) || R > hi * (1 + 1e-12))
        throw DomainError("v_out_cotan: kqr=" + num(R) + " outside [" +
                          num(lo) + ", " + num(hi) + "]");
    const double th = gamma_arg(0, nu).theta;
    // nq log r + nq log(mu/2) = nu log(R/2) + pi/2 with mu = kq e^{pi/(2nq)}
    const double arg = nu * std::log(R / 2.0) - th;
    CotanEval c;
    c.value = p.sign() * (p.n / r) * std::cos(arg) / std::sin(arg);
    c.error_band = nu * nu * std::fabs(c.value);
    c.near_pole = std::fabs(std::sin(arg)) < pole_delta;
    return c;
}

struct OuterScanReport {
    bool pass = false;
    double margin_dV0 = 0.0;      ///< min of dV0 (scaled)
    double margin_V0 = 0.0;       ///< min of -1 - V0
    double margin_dF0 = 0.0;      ///< min of dF0
    double margin_F0_half = 0.0;  ///< min of F0 - 1/2
    double margin_K_sign = 0.0;   ///< min over K>0, -K'>0, K''>0 relative
    double M_v = 0.0;             ///< fitted constant of the v_out magnitude bounds
    double M_f = 0.0;             ///< fitted constant of the f_out magnitude bounds
    double large_R_law = 0.0;     ///< max |R^2 (V0 + 1 + 1/(2R))| on R in [50, 1e3]
    double r_min = 0.0;
    std::size_t points = 0;
};

/// Runtime check of the outer-dominant sign, monotonicity and size properties.
inline OuterScanReport outer_property_scan(const OuterParams& p, const std::vector<double>& R_grid,
                                           const OuterOptions& opt = {})
{
    OuterScanReport rep;
    if (R_grid.empty()) throw ConfigError("outer_property_scan: empty grid");
    const double Rmin = validated_min_R(p.nu);
    for (double R : R_grid)
        if (R < Rmin)
            throw DomainError("outer_property_scan: grid point " + num(R) +
                              " below validated range " + num(Rmin));
    const double eps = p.eps();
    rep.r_min = *std::min_element(R_grid.begin(), R_grid.end()) / eps;
    const double rmin = rep.r_min, aq = std::fabs(p.q);
    double mdv = INFINITY, mv = INFINITY, mdf = INFINITY, mf = INFINITY, mk = INFINITY;
    double Mv = 0, Mf = 0, law = 0;
    for (double R : R_grid) {
        const auto e = outer_eval(p, R, opt);
        const auto K = k_imag(p.nu, R, opt.specfun);
        const double ks = std::fabs(K.value) + std::fabs(K.derivative) + std::fabs(K.second);
        if (ks > 0 && std::isfinite(ks))
            mk = std::min({mk, K.value / ks, -K.derivative / ks, K.second / ks});
        mdv = std::min(mdv, e.dV0 / (1.0 + std::fabs(e.dV0)));
        mv = std::min(mv, -1.0 - e.V0);
        mdf = std::min(mdf, e.dF0 / (1.0 + std::fabs(e.dF0)));
        mf = std::min(mf, e.F0 - 0.5);
        const double r = R / eps;
        const double k = p.k;
        const double v = k * e.V0, dv = k * eps * e.dV0, ddv = k * eps * eps * e.ddV0;
        const double f = e.F0, df = eps * e.dF0, ddf = eps * eps * e.ddF0;
        Mv = std::max({Mv, std::fabs(v) * rmin, std::fabs(r * dv) * rmin,
                       std::fabs(r * r * ddv) * rmin, std::fabs(r * (v + k)) * aq,
                       std::fabs(r * r * dv) * aq, std::fabs(r * r * r * ddv) * aq});
        Mf = std::max({Mf, std::fabs(r * r * df) * aq * rmin, std::fabs(r * r * r * ddf) * aq * rmin,
                       std::fabs(1 - f) * rmin * rmin, std::fabs(r * df) * rmin * rmin,
                       std::fabs(r * r * ddf) * rmin * rmin});
        if (R >= 50.0 && R <= 1e3) law = std::max(law, std::fabs(R * R * (e.V0 + 1.0 + 0.5 / R)));
        ++rep.points;
    }
    rep.margin_dV0 = mdv;
    rep.margin_V0 = mv;
    rep.margin_dF0 = mdf;
    rep.margin_F0_half = mf;
    rep.margin_K_sign = mk;
    rep.M_v = Mv;
    rep.M_f = Mf;
    rep.large_R_law = law;
    rep.pass = mdv > 0 && mv > 0 && mdf > 0 && mk > 0 && std::isfinite(Mv) && std::isfinite(Mf);
    return rep;
}

/// |V0' + V0/R + V0^2 + nu^2/R^2 - 1| with V0' = K''/K - (K'/K)^2 taken from the
/// Bessel branch itself, normalized by the sum of the term magnitudes.
inline double riccati_residual(const OuterParams& p, double R, const OuterOptions& opt = {})
{
    const double nu = p.nu;
    double V, dV;
    if (R < opt.specfun.x_split) {
        const auto K = k_imag_series(nu, R, opt.specfun);
        V = K.derivative / K.value;
        dV = K.second / K.value - V * V;
    } else {
        const auto s = detail::k_imag_asym_sums(nu, R, opt.specfun.max_terms);
        V = static_cast<double>(s.s1 / s.s0);
        dV = static_cast<double>(s.s2 / s.s0) - V * V;
    }
    const double terms = std::fabs(dV) + std::fabs(V / R) + V * V + nu * nu / (R * R) + 1.0;
    return std::fabs(dV + V / R + V * V + nu * nu / (R * R) - 1.0) / terms;
}

} // namespace spiral
