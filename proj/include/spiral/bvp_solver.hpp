#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asymptotic_wavenumber.hpp"
#include "errors.hpp"
#include "inner_core.hpp"
#include "interp.hpp"
#include "outer_dominant.hpp"
#include "quadrature.hpp"
#include "radial_bvp.hpp"

namespace spiral {

/// (n, q, k) with eps = k|q| and mu = k|q| e^{pi/(2 n |q|)}, all from log k.
struct SpiralParams {
    int n = 1;
    double q = 0.0;
    double k = 0.0;
    double log_k = -INFINITY;
    double eps = 0.0;
    double log_mu = -INFINITY;

    static SpiralParams from_log_k(int n, double q, double log_k)
    {
        SpiralParams p;
        p.n = n;
        p.q = q;
        p.log_k = log_k;
        p.k = std::exp(log_k);
        if (q != 0.0) {
            p.eps = p.k * std::fabs(q);
            p.log_mu = log_k + std::log(std::fabs(q)) + M_PI / (2.0 * n * std::fabs(q));
        }
        return p;
    }
    static SpiralParams from_k(int n, double q, double k)
    {
        if (k > 0) return from_log_k(n, q, std::log(k));
        SpiralParams p;
        p.n = n;
        p.q = q;
        return p;
    }
    double mu() const { return std::exp(log_mu); }
};

struct RadialProfile {
    int n = 1;
    double q = 0.0, k = 0.0;
    std::vector<double> r, f, df, v, I; ///< I(r) = int_0^r xi f^2 (1 - f^2 - k^2)
    double c_f = 0.0;
    double r_max = 0.0;
    double h = 0.0;
    bool escaped = false;
    double escape_radius = 0.0;
    std::string diagnosis;
};

struct WavenumberReport {
    int n = 1;
    double q = 0.0;
    double k_numeric = 0.0;
    double log_k_numeric = 0.0;
    double k_asymptotic = 0.0;
    double log_k_asymptotic = 0.0;
    double ratio = 0.0;
    double abs_ratio_minus_1_times_logq = 0.0;
    double log_k_corrected = 0.0; ///< kappa with exp(+C_n/n^2)
    double ratio_corrected = 0.0;
    double C_n = 0.0;
    double c_f = 0.0;
    double r_max = 0.0;
    double R_match = 0.0; ///< k|q| r_max
    double m_f = 0.0, m_v = 0.0;
    double m_df = 0.0; ///< f'(r_max) - f_out'(r_max), not imposed
    int newton_iterations = 0;
    int inner_iterations = 0;
    double inner_residual = 0.0;
    double first_integral = 0.0;  ///< max |r f^2 v + q I| over the nodes
    double system_residual = 0.0; ///< max ODE residual over interior nodes
    bool f_increasing = false;
    bool f_bounded = false;  ///< 0 < f < sqrt(1 - k^2)
    bool v_signed = false;   ///< sign(q) v < 0 for r > 0
    bool converged = false;
    bool suspect = false;
    std::string message;
};

struct SpiralSolution {
    RadialProfile profile;
    WavenumberReport report;
    BvpState state; ///< nodal unknowns, reusable as a warm start
};

struct SolveOptions {
    double h = 0.02;
    int order = 6;
    int quad_points = 8;
    double R_target = 2.0;      ///< k|q| r_max
    double min_R_factor = 1.25; ///< R_match >= this times the validated outer edge
    double min_r_max = 20.0;
    double r_max = 0.0;         ///< fixed matching radius when positive
    long max_nodes = 400000;
    double inner_tol = 1e-10;
    double match_tol = 1e-11;
    double step_tol = 1e-11; ///< on |delta log k|
    int max_iter = 50;
    double fd_step = 1e-6; ///< in log k
    OuterOptions outer{};
};

// ---------------------------------------------------------------------------
// Residuals

inline std::pair<double, double> system_residual(double r, double f, double df, double ddf, double v,
                                                 double dv, const SpiralParams& p)
{
    const double n2 = double(p.n) * p.n;
    const double rf = ddf + df / r - f * n2 / (r * r) + f * (1 - f * f - v * v);
    const double rv = f * dv + f * v / r + 2 * df * v + p.q * f * (1 - f * f - p.k * p.k);
    return {rf, rv};
}

/// Residuals of the lambda-omega reduction with chi' = chi_d.
inline std::pair<double, double> lambda_omega_residual(double r, int n, double f, double df, double ddf,
                                                       double chi_d, double chi_dd,
                                                       const std::function<double(double)>& lambda_fn,
                                                       const std::function<double(double)>& omega_fn,
                                                       double Omega)
{
    const double n2 = double(n) * n;
    const double rf = ddf + df / r - f * n2 / (r * r) + f * (lambda_fn(f) - chi_d * chi_d);
    const double rc = f * chi_dd + f * chi_d / r + 2 * df * chi_d + f * (omega_fn(f) - Omega);
    return {rf, rc};
}

// ---------------------------------------------------------------------------
// Matching constant, computed once per n

inline InnerConstants matching_constant(int n)
{
    static std::mutex mu;
    static std::map<int, InnerConstants> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    const auto p = solve_f0(n, 200.0);
    const auto c = compute_Cn(p);
    cache.emplace(n, c);
    return c;
}

// ---------------------------------------------------------------------------
// Shooting from the origin

/// Series start at small r, then RK4 on (f, f', I) in long double with steps
/// graded like r near 0; v = -q I/(r f^2) throughout.
inline RadialProfile integrate_from_origin(const SpiralParams& p, double c_f, double r_max,
                                           double h = 1e-3, double r_start = 1e-2, int store_every = 10)
{
    if (!(c_f > 0.0)) throw DomainError("integrate_from_origin: c_f must be positive");
    if (!(r_max > r_start)) throw DomainError("integrate_from_origin: r_max must exceed r_start");
    using ld = long double;
    const int n = p.n;
    const ld q = p.q, k2 = (ld)p.k * p.k, n2 = (ld)n * n;
    // f ~ c r^n (1 + b1 r^2), I ~ (1 - k^2) c^2 r^{2n+2}/(2n+2) at the start
    const auto b = f0_origin_series(n, c_f, 8);
    ld f = 0, df = 0;
    for (int j = 0; j < 8; ++j) {
        const ld e = n + 2 * j;
        f += (ld)c_f * b[j] * std::pow((ld)r_start, e);
        df += (ld)c_f * b[j] * e * std::pow((ld)r_start, e - 1);
    }
    // the v^2 term first enters at r^{n+4}: below the truncation at r_start = 1e-2
    ld I = (1 - k2) * (ld)c_f * c_f * std::pow((ld)r_start, (ld)(2 * n + 2)) / (2 * n + 2);

    RadialProfile out;
    out.n = n;
    out.q = p.q;
    out.k = p.k;
    out.c_f = c_f;
    out.r_max = r_max;
    out.h = h;
    auto push = [&](ld r) {
        out.r.push_back((double)r);
        out.f.push_back((double)f);
        out.df.push_back((double)df);
        out.I.push_back((double)I);
        out.v.push_back((double)(-q * I / (r * f * f)));
    };
    struct S {
        ld f, df, I;
    };
    auto rhs = [&](ld r, const S& s) {
        const ld v = -q * s.I / (r * s.f * s.f);
        const ld f2 = s.f * s.f;
        return S{s.df, -s.df / r + n2 * s.f / (r * r) - s.f * (1 - f2 - v * v), r * f2 * (1 - f2 - k2)};
    };
    ld r = r_start;
    push(r);
    long step = 0;
    while (r < (ld)r_max) {
        const ld hh = std::min<ld>({(ld)h, 0.01L * r, (ld)r_max - r});
        const S s0{f, df, I};
        const S a = rhs(r, s0);
        const S b2 = rhs(r + hh / 2, {f + hh / 2 * a.f, df + hh / 2 * a.df, I + hh / 2 * a.I});
        const S c = rhs(r + hh / 2, {f + hh / 2 * b2.f, df + hh / 2 * b2.df, I + hh / 2 * b2.I});
        const S d = rhs(r + hh, {f + hh * c.f, df + hh * c.df, I + hh * c.I});
        f += hh / 6 * (a.f + 2 * b2.f + 2 * c.f + d.f);
        df += hh / 6 * (a.df + 2 * b2.df + 2 * c.df + d.df);
        I += hh / 6 * (a.I + 2 * b2.I + 2 * c.I + d.I);
        r += hh;
        ++step;
        if (f > 1 || f <= 0 || df < 0) {
            push(r);
            out.escaped = true;
            out.escape_radius = (double)r;
            out.diagnosis = f > 1 ? "f exceeded 1" : (f <= 0 ? "f turned negative" : "f turned back down");
            return out;
        }
        if (step % store_every == 0 || r >= (ld)r_max) push(r);
    }
    return out;
}

/// +1 if the trajectory overshoots, -1 if it falls back, 0 if it reaches r_max.
inline int escape_direction(const RadialProfile& p)
{
    if (!p.escaped) return 0;
    return p.diagnosis == "f exceeded 1" ? +1 : -1;
}

// ---------------------------------------------------------------------------
// Matching at r_max

struct Mismatch {
    double m_f = 0.0, m_v = 0.0;
};

inline Mismatch outer_mismatch(double r_max, double f_at, double v_at, const SpiralParams& p,
                               const OuterOptions& opt = {})
{
    const OuterParams op(p.n, p.q, p.k);
    const double R = p.eps * r_max;
    if (!opt.allow_below_validated && R < validated_min_R(op.nu))
        throw ConfigError("outer_mismatch: k|q| r_max = " + num(R) + " below the validated outer range " +
                          num(validated_min_R(op.nu)));
    const auto o = outer_at(op, r_max, opt);
    return {f_at - o.f, v_at - o.v};
}

namespace detail {

/// r_max for a given k: k|q| r_max = R_target, raised to clear the validated outer edge.
inline double choose_r_max(int n, double q, double log_k, const SolveOptions& opt)
{
    if (opt.r_max > 0.0) {
        if (opt.r_max / opt.h > opt.max_nodes)
            throw ConfigError("solve_spiral: r_max = " + num(opt.r_max) + " exceeds the node budget");
        return opt.r_max;
    }
    const double nu = n * std::fabs(q);
    const double R = std::max(opt.R_target, opt.min_R_factor * validated_min_R(nu));
    const double log_r = std::log(R) - log_k - std::log(std::fabs(q));
    const double log_budget = std::log(opt.max_nodes * opt.h);
    if (log_r > log_budget)
        throw ConfigError("solve_spiral: matching needs log r_max = " + num(log_r) + " (r_max = " +
                          num(std::exp(log_r)) + ") but the node budget allows log r_max <= " +
                          num(log_budget) + "; q=" + num(q) + " is below the tractable window");
    return std::max(opt.min_r_max, std::exp(log_r));
}

/// Resample a nodal state onto another grid (linear, f clamped positive).
inline BvpState resample(const std::vector<double>& r_old, const BvpState& s, const RadialBvp& bvp)
{
    BvpState out;
    const int N = bvp.N();
    out.f.resize(N + 1);
    out.w.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        const double r = bvp.r(i);
        if (r >= r_old.back()) {
            out.f[i] = s.f.back();
            // w grows like -q k^2 r^2/2 at most; hold v fixed instead
            const double rb = r_old.back(), fb = s.f.back();
            const double vb = s.w.back() / (rb * fb * fb);
            out.w[i] = r * out.f[i] * out.f[i] * vb;
            continue;
        }
        const auto it = std::upper_bound(r_old.begin(), r_old.end(), r);
        const std::size_t j = std::max<std::size_t>(1, it - r_old.begin());
        const double t = (r - r_old[j - 1]) / (r_old[j] - r_old[j - 1]);
        out.f[i] = (1 - t) * s.f[j - 1] + t * s.f[j];
        out.w[i] = (1 - t) * s.w[j - 1] + t * s.w[j];
    }
    out.f[0] = 0.0;
    out.w[0] = 0.0;
    return out;
}

struct InnerEval {
    BvpResult res;
    double m_v = 0.0;
    double f_right = 0.0;
};

inline InnerEval inner_at_k(const RadialBvp& bvp, const SpiralParams& p, const BvpState& guess,
                            const SolveOptions& opt)
{
    const double r_max = bvp.r(bvp.N());
    const OuterParams op(p.n, p.q, p.k);
    const auto o = outer_at(op, r_max, opt.outer);
    BvpNewtonOptions nopt;
    nopt.tol = opt.inner_tol;
    InnerEval e;
    e.f_right = o.f;
    e.res = bvp.solve(p.q, p.k, o.f, guess, nopt);
    const auto& s = e.res.state;
    const int N = bvp.N();
    const double v = s.w[N] / (r_max * s.f[N] * s.f[N]);
    e.m_v = v - o.v;
    return e;
}

/// Initial nodal state: the core profile scaled to sqrt(1 - k^2), v from its small-r law.
inline BvpState initial_state(const RadialBvp& bvp, int n, double q, double k)
{
    BvpState s;
    const int N = bvp.N();
    s.f.resize(N + 1);
    s.w.resize(N + 1);
    const double amp = std::sqrt(1 - k * k);
    for (int i = 0; i <= N; ++i) {
        const double r = bvp.r(i);
        s.f[i] = amp * f0_guess(n, r);
        // v ~ -sign(q) k tanh(k|q| r) keeps w of the right sign and growth
        const double v = -(q < 0 ? -1.0 : 1.0) * k * std::tanh(std::max(k * std::fabs(q), 0.05) * r);
        s.w[i] = r * s.f[i] * s.f[i] * v;
    }
    return s;
}

} // namespace detail

/// Post-solve profile, diagnostics and report for a converged nodal state.
inline void finish_solution(SpiralSolution& sol, const RadialBvp& bvp, const SpiralParams& p,
                            const detail::InnerEval& ev, const SolveOptions& opt)
{
    auto& prof = sol.profile;
    auto& rep = sol.report;
    const int N = bvp.N();
    const auto& s = ev.res.state;
    sol.state = s;
    prof.n = p.n;
    prof.q = p.q;
    prof.k = p.k;
    prof.h = bvp.h();
    prof.r_max = bvp.r(N);
    prof.r.resize(N + 1);
    for (int i = 0; i <= N; ++i) prof.r[i] = bvp.r(i);
    prof.f = s.f;
    std::vector<double> d2;
    bvp.derivatives(prof.f, prof.df, d2);
    prof.v.assign(N + 1, 0.0);
    prof.I.assign(N + 1, 0.0);
    for (int i = 1; i <= N; ++i) {
        prof.v[i] = s.w[i] / (prof.r[i] * s.f[i] * s.f[i]);
        prof.I[i] = p.q != 0.0 ? -s.w[i] / p.q : 0.0;
    }
    prof.c_f = detail::leading_coefficient(p.n, prof.r, prof.f);
    if (p.n == 1) prof.df[0] = prof.c_f;

    // independent check of the first integral: adaptive quadrature on a
    // quintic Hermite interpolant of f, with f'' from the equation
    std::vector<double> ddf(N + 1, 0.0);
    const double n2 = double(p.n) * p.n;
    for (int i = 1; i <= N; ++i) {
        const double r = prof.r[i], f = prof.f[i], v = prof.v[i];
        ddf[i] = -prof.df[i] / r + n2 * f / (r * r) - f * (1 - f * f - v * v);
    }
    ddf[0] = p.n == 2 ? 2 * prof.c_f : 0.0;
    interp::Hermite fi(prof.r, prof.f, prof.df, ddf);
    const double k2 = p.k * p.k;
    double Iacc = 0.0, fi_err = 0.0, sys = 0.0;
    for (int i = 1; i <= N; ++i) {
        const double a = prof.r[i - 1], b = prof.r[i];
        Iacc += quad::integrate(
                    [&](double x) {
                        const double g = fi(x);
                        return x * g * g * (1 - g * g - k2);
                    },
                    a, b, 1e-12, 1e-20)
                    .value;
        const double lhs = prof.r[i] * prof.f[i] * prof.f[i] * prof.v[i];
        fi_err = std::max(fi_err, std::fabs(lhs + p.q * Iacc));
    }
    // ODE residuals at interior nodes; v' from the differential form of w
    for (int i = 1; i < N; ++i) {
        const double r = prof.r[i], f = prof.f[i], v = prof.v[i];
        const double dw = -p.q * r * f * f * (1 - f * f - k2);
        const double dv = (dw - v * (f * f + 2 * r * f * prof.df[i])) / (r * f * f);
        const auto [rf, rv] = system_residual(r, f, prof.df[i], d2[i], v, dv, p);
        sys = std::max({sys, std::fabs(rf), std::fabs(rv)});
    }

    const OuterParams op(p.n, p.q, p.k);
    const auto o = outer_at(op, prof.r_max, opt.outer);
    rep.n = p.n;
    rep.q = p.q;
    rep.k_numeric = p.k;
    rep.log_k_numeric = p.log_k;
    rep.c_f = prof.c_f;
    rep.r_max = prof.r_max;
    rep.R_match = p.eps * prof.r_max;
    rep.m_f = prof.f[N] - o.f;
    rep.m_v = prof.v[N] - o.v;
    rep.m_df = prof.df[N] - o.df;
    rep.inner_iterations = ev.res.iterations;
    rep.inner_residual = ev.res.residual;
    rep.first_integral = fi_err;
    rep.system_residual = sys;

    bool inc = true, bnd = true, sgn = true;
    const double top = std::sqrt(1 - k2), sq = p.q < 0 ? -1.0 : 1.0;
    for (int i = 1; i <= N; ++i) {
        inc = inc && prof.f[i] > prof.f[i - 1];
        bnd = bnd && prof.f[i] > 0 && prof.f[i] < top;
        sgn = sgn && (p.q == 0.0 || sq * prof.v[i] < 0);
    }
    rep.f_increasing = inc;
    rep.f_bounded = bnd;
    rep.v_signed = sgn;
    rep.suspect = !(inc && bnd && sgn);
    if (rep.suspect) rep.message = "converged profile violates monotonicity/bounds/sign";

    if (p.q != 0.0) {
        const auto C = matching_constant(p.n);
        rep.C_n = C.C_n;
        const auto w = kappa_symmetric(p.n, p.q, C.C_n);
        rep.k_asymptotic = w.kappa;
        rep.log_k_asymptotic = w.log_kappa;
        rep.ratio = std::exp(p.log_k - w.log_kappa);
        rep.abs_ratio_minus_1_times_logq = std::fabs(rep.ratio - 1) * std::fabs(std::log(std::fabs(p.q)));
        rep.log_k_corrected = kappa_symmetric(p.n, p.q, C.C_n, CnSign::corrected).log_kappa;
        rep.ratio_corrected = std::exp(p.log_k - rep.log_k_corrected);
    }
}

/// Nested solve: for fixed k the inner problem on [0, r_max] is solved with
/// f(r_max) taken from the outer dominant; Newton in log k then drives
/// m_v = v(r_max) - v_out(r_max) to zero.
inline SpiralSolution solve_spiral(int n, double q, const SolveOptions& opt = {},
                                   std::optional<double> k_init = std::nullopt,
                                   const SpiralSolution* warm = nullptr)
{
    if (n < 1) throw DomainError("solve_spiral: n must be a positive integer");
    if (!std::isfinite(q) || n * std::fabs(q) > 1.0)
        throw DomainError("solve_spiral: need n|q| <= 1 (imaginary Bessel order), got n=" +
                          std::to_string(n) + ", q=" + num(q));
    if (opt.max_iter < 1 || opt.max_iter > 50) throw ConfigError("solve_spiral: max_iter must be in 1..50");

    SpiralSolution sol;
    BvpGridSpec spec;
    spec.h = opt.h;
    spec.order = opt.order;
    spec.quad_points = opt.quad_points;

    if (q == 0.0) {
        // untwisted: v = 0, f = f0
        spec.r_max = 100.0;
        RadialBvp bvp(n, spec);
        auto p = SpiralParams::from_k(n, 0.0, 0.0);
        BvpState g = detail::initial_state(bvp, n, 0.0, 0.0);
        BvpNewtonOptions nopt;
        nopt.tol = opt.inner_tol;
        detail::InnerEval ev;
        ev.res = bvp.solve(0.0, 0.0, f0_far_field(n, spec.r_max), g, nopt);
        sol.state = ev.res.state;
        auto& prof = sol.profile;
        prof.n = n;
        prof.r_max = spec.r_max;
        prof.h = bvp.h();
        for (int i = 0; i <= bvp.N(); ++i) prof.r.push_back(bvp.r(i));
        prof.f = ev.res.state.f;
        std::vector<double> d2;
        bvp.derivatives(prof.f, prof.df, d2);
        prof.v.assign(prof.r.size(), 0.0);
        prof.I = bvp.cumulative(
            prof.f, [](double r, double f) { return r * f * f * (1 - f * f); },
            [](double, double f) { return 0.5 * f * f * (1 - f * f); });
        prof.c_f = detail::leading_coefficient(n, prof.r, prof.f);
        auto& rep = sol.report;
        rep.n = n;
        rep.converged = ev.res.converged;
        rep.inner_iterations = ev.res.iterations;
        rep.inner_residual = ev.res.residual;
        rep.c_f = prof.c_f;
        rep.r_max = spec.r_max;
        rep.log_k_numeric = -INFINITY;
        rep.f_increasing = true;
        for (std::size_t i = 1; i < prof.f.size(); ++i) rep.f_increasing &= prof.f[i] > prof.f[i - 1];
        rep.f_bounded = true;
        rep.v_signed = true;
        rep.m_f = prof.f.back() - f0_far_field(n, spec.r_max);
        (void)p;
        return sol;
    }

    const double C = matching_constant(n).C_n;
    // default guess from the corrected-sign formula: the printed one exceeds 1 for n >= 2
    double x = k_init ? std::log(*k_init)
                      : std::min(kappa_symmetric(n, q, C, CnSign::corrected).log_kappa, std::log(0.5));
    if (!std::isfinite(x) || x >= 0.0) throw DomainError("solve_spiral: initial k must lie in (0, 1)");

    // one bordered solve on the grid fixed by the current k guess
    auto attempt = [&](double& lk, const SpiralSolution* seed) {
        spec.r_max = detail::choose_r_max(n, q, lk, opt);
        RadialBvp bvp(n, spec);
        BvpState guess = seed ? detail::resample(seed->profile.r, seed->state, bvp)
                              : detail::initial_state(bvp, n, q, std::exp(lk));
        const double r_max = bvp.r(bvp.N());
        auto match = [&](double xx) {
            RadialBvp::MatchData md;
            const double d = opt.fd_step;
            const auto o = outer_at(OuterParams(n, q, std::exp(xx)), r_max, opt.outer);
            const auto op = outer_at(OuterParams(n, q, std::exp(xx + d)), r_max, opt.outer);
            const auto om = outer_at(OuterParams(n, q, std::exp(xx - d)), r_max, opt.outer);
            md.f = o.f;
            md.v = o.v;
            md.df_dx = (op.f - om.f) / (2 * d);
            md.dv_dx = (op.v - om.v) / (2 * d);
            return md;
        };
        BvpNewtonOptions nopt;
        nopt.tol = opt.inner_tol;
        nopt.max_iter = opt.max_iter;
        detail::InnerEval ev;
        ev.res = bvp.solve_matched(q, lk, match, guess, nopt);
        ev.f_right = ev.res.state.f.back();
        SpiralSolution out;
        finish_solution(out, bvp, SpiralParams::from_log_k(n, q, lk), ev, opt);
        out.report.newton_iterations = ev.res.iterations;
        out.report.converged = true;
        return out;
    };
    // re-grid until k|q| r_max sits at the target
    auto settle = [&](double lk, const SpiralSolution* seed) {
        SpiralSolution cur = attempt(lk, seed);
        int total = cur.report.newton_iterations;
        for (int pass = 0; pass < 3; ++pass) {
            const double want = detail::choose_r_max(n, q, lk, opt);
            if (std::fabs(std::log(want / cur.report.r_max)) < std::log(1.25)) break;
            SpiralSolution next = attempt(lk, &cur);
            total += next.report.newton_iterations;
            cur = std::move(next);
        }
        cur.report.newton_iterations = total;
        return cur;
    };

    try {
        return settle(x, warm);
    } catch (const ConvergenceError&) {
        if (warm) throw;
    }
    // cold start failed: continue in q from the easy region
    const double sgn = q < 0 ? -1.0 : 1.0, q0 = 0.5 * sgn;
    if (std::fabs(q) == 0.5) throw ConvergenceError("solve_spiral: cold start failed at q=" + num(q));
    SpiralSolution cur =
        settle(std::min(kappa_symmetric(n, q0, C, CnSign::corrected).log_kappa, std::log(0.5)), nullptr);
    const int steps = std::max(1, static_cast<int>(std::ceil(std::fabs(q - q0) / 0.05)));
    int total = cur.report.newton_iterations;
    for (int i = 1; i <= steps; ++i) {
        const double qi = q0 + (q - q0) * i / steps;
        const double dl = kappa_symmetric(n, qi, C).log_kappa - kappa_symmetric(n, cur.report.q, C).log_kappa;
        double lk = cur.report.log_k_numeric + dl;
        SpiralSolution next = [&] {
            // same-n solve at the intermediate q
            SolveOptions o2 = opt;
            return solve_spiral(n, qi, o2, std::exp(lk), &cur);
        }();
        total += next.report.newton_iterations;
        cur = std::move(next);
    }
    cur.report.newton_iterations = total;
    return cur;
}

/// Descending sweep with warm starts; failures are recorded and skipped.
inline std::vector<WavenumberReport> wavenumber_sweep(int n, const std::vector<double>& q_list,
                                                      const SolveOptions& opt = {},
                                                      std::vector<SpiralSolution>* solutions = nullptr)
{
    for (std::size_t i = 1; i < q_list.size(); ++i)
        if (!(q_list[i] < q_list[i - 1])) throw ConfigError("wavenumber_sweep: q_list must be strictly descending");
    std::vector<WavenumberReport> out;
    std::optional<SpiralSolution> prev;
    const double C = matching_constant(n).C_n;
    for (double q : q_list) {
        WavenumberReport rep;
        rep.n = n;
        rep.q = q;
        try {
            std::optional<double> k0;
            if (prev) {
                // shift the previous k by the change in kappa
                const double dl = kappa_symmetric(n, q, C).log_kappa -
                                  kappa_symmetric(n, prev->report.q, C).log_kappa;
                k0 = std::exp(prev->report.log_k_numeric + dl);
            }
            auto s = solve_spiral(n, q, opt, k0, prev ? &*prev : nullptr);
            rep = s.report;
            if (solutions) solutions->push_back(s);
            prev = std::move(s);
        } catch (const std::exception& e) {
            rep.converged = false;
            rep.message = e.what();
        }
        out.push_back(rep);
    }
    return out;
}

} // namespace spiral
