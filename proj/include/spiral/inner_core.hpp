#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "interp.hpp"
#include "quadrature.hpp"
#include "radial_bvp.hpp"

namespace spiral {

/// Far-field coefficients of f0 = 1 + sum_j a_j r^{-2j}, j = 1..5.
inline std::vector<double> f0_far_coefficients(int n)
{
    const double m = double(n) * n;
    return {-m / 2,
            -m * (m + 8) / 8,
            -m * (m * m + 32 * m + 128) / 16,
            -m * (5 * m * m * m + 400 * m * m + 5824 * m + 18432) / 128,
            -m * (7 * m * m * m * m + 1120 * m * m * m + 38592 * m * m + 415744 * m + 1179648) / 256};
}

/// Truncated far-field series of f0 and its first derivative.
inline double f0_far_field(int n, double r, double* deriv = nullptr)
{
    const auto a = f0_far_coefficients(n);
    double s = 1.0, d = 0.0, rp = 1.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        rp /= r * r;
        s += a[j] * rp;
        d += -2.0 * (j + 1) * a[j] * rp / r;
    }
    if (deriv) *deriv = d;
    return s;
}

/// Coefficients c_p of xi f0^2 (1 - f0^2) = n^2/xi + sum c_p xi^{-p}, p = 3,5,...,11.
inline std::vector<double> cn_tail_coefficients(int n)
{
    const double m = double(n) * n;
    return {-m * (m - 2),
            -m * (m - 16),
            -2 * m * (m * m - 23 * m - 144),
            -m * (3 * m * m * m - 74 * m * m - 2448 * m - 9216),
            -m * (4 * m * m * m * m - 65 * m * m * m - 10284 * m * m - 147872 * m - 460800)};
}

/// int_R^inf (xi f0^2 (1 - f0^2) - n^2/xi) dxi from the series above.
inline double cn_tail(int n, double R)
{
    const auto c = cn_tail_coefficients(n);
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        const int p = 3 + 2 * static_cast<int>(j);
        s += c[j] / ((p - 1) * std::pow(R, p - 1));
    }
    return s;
}

/// Core profile f0 with cumulative integrals.
struct InnerProfile {
    int n = 1;
    std::vector<double> r, f0, df0, ddf0;
    std::vector<double> J1; ///< int_0^r xi f0^2 (1 - f0^2)
    std::vector<double> J2; ///< int_0^r xi f0^2
    double c_f = 0.0;
    double h = 0.0;
    double r_max = 0.0;
    int iterations = 0;
    double residual = 0.0;
    int order = 6;

    double f0_at(double x) const;
    double df0_at(double x) const;
    interp::Hermite f_interp, J1_interp, J2_interp;
};

inline double InnerProfile::f0_at(double x) const { return f_interp(x); }
inline double InnerProfile::df0_at(double x) const { return f_interp.derivative(x); }

struct InnerConstants {
    int n = 1;
    double C_n = 0.0;
    double c_f = 0.0;
    double convergence_gap = 0.0;
    double C_half = 0.0;   ///< value evaluated at r_max/2
    double fitted_c3 = 0.0; ///< xi^{-3} tail coefficient fitted from the profile
};

struct InnerOptions {
    double h = 0.02;
    int order = 6;
    int quad_points = 8;
};

namespace detail {

/// c such that the origin series through c matches f at the node nearest r = 1.
/// Fitting f/r^n on the first nodes loses digits for n >= 2 since f ~ r^n there.
inline double leading_coefficient(int n, const std::vector<double>& r, const std::vector<double>& f);

inline interp::Hermite integral_interp(const std::vector<double>& r, const std::vector<double>& J,
                                       const std::vector<double>& f, const std::vector<double>& df,
                                       bool with_k_term)
{
    // J' = r f^2 (1 - f^2) or r f^2, J'' by the product rule
    std::vector<double> d1(r.size()), d2(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double f2 = f[i] * f[i];
        if (with_k_term) {
            d1[i] = r[i] * f2 * (1 - f2);
            d2[i] = f2 * (1 - f2) + r[i] * (2 * f[i] * df[i] - 4 * f2 * f[i] * df[i]);
        } else {
            d1[i] = r[i] * f2;
            d2[i] = f2 + 2 * r[i] * f[i] * df[i];
        }
    }
    return interp::Hermite(r, J, d1, d2);
}

} // namespace detail

/// Coefficients b_j of the regular solution f0 = c r^n sum_j b_j r^{2j}, b_0 = 1,
/// from c b_j ((n+2j)^2 - n^2) = -c b_{j-1} + c^3 [r^{2(j-1-n)}] (sum b r^2)^3.
inline std::vector<double> f0_origin_series(int n, double c, int terms)
{
    std::vector<double> b(terms, 0.0), sq(terms, 0.0), cube(terms, 0.0);
    b[0] = 1.0;
    auto update = [&](int upto) {
        for (int j = 0; j <= upto; ++j) {
            sq[j] = 0;
            for (int i = 0; i <= j; ++i) sq[j] += b[i] * b[j - i];
        }
        for (int j = 0; j <= upto; ++j) {
            cube[j] = 0;
            for (int i = 0; i <= j; ++i) cube[j] += sq[i] * b[j - i];
        }
    };
    update(0);
    for (int j = 1; j < terms; ++j) {
        double rhs = -b[j - 1];
        if (j - 1 - n >= 0) rhs += c * c * cube[j - 1 - n];
        b[j] = rhs / (4.0 * j * (n + j));
        update(j);
    }
    return b;
}

inline double detail::leading_coefficient(int n, const std::vector<double>& r, const std::vector<double>& f)
{
    const double h = r[1] - r[0];
    const std::size_t i = std::min<std::size_t>(r.size() - 1, static_cast<std::size_t>(std::lround(1.0 / h)));
    const double x = r[i];
    auto series = [&](double c) {
        const auto b = f0_origin_series(n, c, 40);
        double s = 0, t = std::pow(x, n);
        for (double bj : b) {
            s += bj * t;
            t *= x * x;
        }
        return c * s - f[i];
    };
    // secant from the leading-order guess
    double c0 = f[i] / std::pow(x, n), c1 = 1.01 * c0;
    double g0 = series(c0), g1 = series(c1);
    for (int it = 0; it < 60 && g1 != g0; ++it) {
        const double c2 = c1 - g1 * (c1 - c0) / (g1 - g0);
        c0 = c1;
        g0 = g1;
        c1 = c2;
        g1 = series(c1);
        if (std::fabs(c1 - c0) <= 1e-15 * std::fabs(c1)) break;
    }
    return c1;
}

/// Initial profile with the right behaviour at 0 and infinity.
inline double f0_guess(int n, double r)
{
    return std::pow(r * r / (r * r + n), 0.5 * n);
}

/// Core amplitude on [0, r_max] with the far-field series as the right boundary value.
inline InnerProfile solve_f0(int n, double r_max, double tol = 1e-10, const InnerOptions& opt = {})
{
    if (n < 1) throw DomainError("solve_f0: n must be a positive integer");
    if (!(r_max >= 50.0)) throw ConfigError("solve_f0: r_max must be at least 50, got " + num(r_max));
    if (!(tol >= 1e-12)) throw ConfigError("solve_f0: tol must be at least 1e-12");
    BvpGridSpec spec;
    spec.h = opt.h;
    spec.r_max = r_max;
    spec.order = opt.order;
    spec.quad_points = opt.quad_points;
    RadialBvp bvp(n, spec);
    const int N = bvp.N();
    BvpState s;
    s.f.resize(N + 1);
    s.w.assign(N + 1, 0.0);
    for (int i = 0; i <= N; ++i) s.f[i] = f0_guess(n, bvp.r(i));
    const double fr = f0_far_field(n, r_max);
    BvpNewtonOptions nopt;
    nopt.tol = tol;
    auto res = bvp.solve(0.0, 0.0, fr, s, nopt);

    InnerProfile p;
    p.n = n;
    p.h = bvp.h();
    p.r_max = r_max;
    p.order = opt.order;
    p.iterations = res.iterations;
    p.residual = res.residual;
    p.r.resize(N + 1);
    for (int i = 0; i <= N; ++i) p.r[i] = bvp.r(i);
    p.f0 = res.state.f;
    std::vector<double> d2;
    bvp.derivatives(p.f0, p.df0, d2);
    // second derivative from the equation itself (exact at the nodes)
    p.ddf0.assign(N + 1, 0.0);
    const double n2 = double(n) * n;
    for (int i = 1; i <= N; ++i) {
        const double r = p.r[i], f = p.f0[i];
        p.ddf0[i] = -p.df0[i] / r + n2 * f / (r * r) - f * (1 - f * f);
    }
    p.c_f = detail::leading_coefficient(n, p.r, p.f0);
    p.df0[0] = n == 1 ? p.c_f : 0.0;
    p.ddf0[0] = n == 2 ? 2 * p.c_f : 0.0;
    p.J1 = bvp.cumulative(
        p.f0, [](double r, double f) { return r * f * f * (1 - f * f); },
        [](double, double f) { return 0.5 * f * f * (1 - f * f); });
    p.J2 = bvp.cumulative(
        p.f0, [](double r, double f) { return r * f * f; }, [](double, double f) { return 0.5 * f * f; });
    p.f_interp = interp::Hermite(p.r, p.f0, p.df0, p.ddf0);
    p.J1_interp = detail::integral_interp(p.r, p.J1, p.f0, p.df0, true);
    p.J2_interp = detail::integral_interp(p.r, p.J2, p.f0, p.df0, false);
    return p;
}

namespace detail {

/// I/(r f0^2) = (1-k^2) r/(2(n+1)) - (1-k^2) b1 r^3/((n+1)(n+2)) - [n=1] c^2 r^3/6 + O(r^5)
inline double v0_series_over_q(int n, double c, double k, double r)
{
    const double b1 = f0_origin_series(n, c, 2)[1];
    double s = (1 - k * k) * r / (2.0 * (n + 1)) - (1 - k * k) * b1 * r * r * r / ((n + 1.0) * (n + 2.0));
    if (n == 1) s -= c * c * r * r * r / 6.0;
    return s;
}

} // namespace detail

/// Closed-form small-r slope: v0_in(r) = -q c_v(k) r + O(r^3).
inline double c_v(int n, double k) { return (1 - k * k) / (2.0 * (n + 1)); }

/// Inner dominant phase gradient -q/(r f0^2) int_0^r xi f0^2 (1 - f0^2 - k^2).
inline double v0_inner(const InnerProfile& p, double k, double q, double r)
{
    if (r < 0 || r > p.r_max)
        throw DomainError("v0_inner: r=" + num(r) + " outside profile range [0, " + num(p.r_max) + "]");
    const int n = p.n;
    if (r < 0.5 * p.h) return -q * detail::v0_series_over_q(n, p.c_f, k, r);
    const double f = p.f0_at(r);
    double I;
    if (r < 8 * p.h) {
        // the interpolated integrals lose relative accuracy where they vanish like r^{2n+2}
        I = quad::integrate(
                [&](double x) {
                    const double g = p.f0_at(x);
                    return x * g * g * (1 - g * g - k * k);
                },
                0.0, r, 1e-13)
                .value;
    } else {
        I = p.J1_interp(r) - k * k * p.J2_interp(r);
    }
    return -q * I / (r * f * f);
}

/// r-derivative from the differential form v' = -q(1 - f^2 - k^2) - v/r - 2 v f'/f.
inline double dv0_inner(const InnerProfile& p, double k, double q, double r)
{
    if (r < 0.5 * p.h) return -q * c_v(p.n, k);
    const double v = v0_inner(p, k, q, r);
    const double f = p.f0_at(r), df = p.df0_at(r);
    return -q * (1 - f * f - k * k) - v / r - 2 * v * df / f;
}

/// Second route to v0_in: RK4 on the differential form from a small-r series start.
inline double v0_inner_ode(const InnerProfile& p, double k, double q, double r, double step = 1e-3)
{
    if (r < 0 || r > p.r_max) throw DomainError("v0_inner_ode: r outside profile range");
    const double r0 = std::min(r, 0.005);
    // v-bar = v/q with the series start
    double vb = -detail::v0_series_over_q(p.n, p.c_f, k, r0);
    auto rhs = [&](double x, double y) {
        const double f = p.f0_at(x), df = p.df0_at(x);
        return -y / x - 2 * y * df / f - (1 - f * f - k * k);
    };
    double x = r0;
    const int steps = std::max(1, static_cast<int>(std::ceil((r - r0) / step)));
    const double hh = (r - r0) / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1 = rhs(x, vb);
        const double k2 = rhs(x + hh / 2, vb + hh / 2 * k1);
        const double k3 = rhs(x + hh / 2, vb + hh / 2 * k2);
        const double k4 = rhs(x + hh, vb + hh * k3);
        vb += hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        x += hh;
    }
    return q * vb;
}

/// C(r) = int_0^r xi f0^2(1 - f0^2) - n^2 log r + analytic tail beyond r.
inline double cn_at(const InnerProfile& p, double r)
{
    return p.J1_interp(r) - double(p.n) * p.n * std::log(r) + cn_tail(p.n, r);
}

/// Matching constant with the gap between r_max and r_max/2 as convergence measure.
inline InnerConstants compute_Cn(const InnerProfile& p, double gap_tol = 1e-6)
{
    if (!(p.r_max >= 100.0)) throw ConfigError("compute_Cn: profile must extend to r_max >= 100");
    InnerConstants c;
    c.n = p.n;
    c.c_f = p.c_f;
    c.C_n = cn_at(p, p.r_max);
    c.C_half = cn_at(p, 0.5 * p.r_max);
    c.convergence_gap = std::fabs(c.C_n - c.C_half);
    // fitted xi^{-3} coefficient of the integrand tail on [r_max/4, r_max/2]
    double sxy = 0, sxx = 0;
    const double n2 = double(p.n) * p.n;
    for (std::size_t i = 0; i < p.r.size(); ++i) {
        const double r = p.r[i];
        if (r < 0.25 * p.r_max || r > 0.5 * p.r_max) continue;
        const double f2 = p.f0[i] * p.f0[i];
        const double y = (r * f2 * (1 - f2) - n2 / r) * r * r * r;
        const double x = 1.0;
        sxy += x * y;
        sxx += x * x;
    }
    c.fitted_c3 = sxx > 0 ? sxy / sxx : 0.0;
    if (c.convergence_gap > gap_tol)
        throw ConvergenceError("compute_Cn: gap " + num(c.convergence_gap) + " above " + num(gap_tol) +
                               "; increase r_max");
    return c;
}

struct InnerScanReport {
    bool pass = false;
    double margin_f0 = 0.0;        ///< min f0 on r > 0
    double margin_df0 = 0.0;       ///< min df0 on r > 0
    double small_r_f = 0.0;        ///< max |f0/(c_f r^n) - 1| on r <= 0.05
    double small_r_df = 0.0;       ///< max |df0/(n c_f r^{n-1}) - 1| on r <= 0.05
    double far_df = 0.0;           ///< max |r^5 (df0 - n^2/r^3)| on r >= 20
    double M_v = 0.0;              ///< max |v0_in| r / (q log r) on 3 <= r < n/(k sqrt 2)
    double M_dv = 0.0;             ///< max |dv0_in| r^2 / (q log r) on the same range
    double margin_v_sign = 0.0;    ///< min of -v0_in/(q r) on sampled (0, n/(k sqrt 2)]
    double slope0 = 0.0;           ///< -lim v0_in/(q r) = c_v
};

/// Runtime check of the core profile laws and of the v0_in bounds.
inline InnerScanReport inner_property_scan(const InnerProfile& p, double k, double q)
{
    InnerScanReport rep;
    const int n = p.n;
    double mf = INFINITY, mdf = INFINITY, sf = 0, sdf = 0, far = 0;
    for (std::size_t i = 1; i < p.r.size(); ++i) {
        const double r = p.r[i];
        mf = std::min(mf, p.f0[i]);
        mdf = std::min(mdf, p.df0[i]);
        if (r <= 0.05) {
            sf = std::max(sf, std::fabs(p.f0[i] / (p.c_f * std::pow(r, n)) - 1));
            sdf = std::max(sdf, std::fabs(p.df0[i] / (n * p.c_f * std::pow(r, n - 1)) - 1));
        }
        if (r >= 20) far = std::max(far, std::fabs(std::pow(r, 5) * (p.df0[i] - double(n) * n / (r * r * r))));
    }
    rep.margin_f0 = mf;
    rep.margin_df0 = mdf;
    rep.small_r_f = sf;
    rep.small_r_df = sdf;
    rep.far_df = far;
    const double rtop = k > 0 ? std::min(p.r_max, n / (k * std::sqrt(2.0))) : p.r_max;
    double Mv = 0, Mdv = 0, ms = INFINITY;
    const double aq = std::fabs(q);
    for (double r = p.h; r <= rtop; r += std::max(p.h, 0.01 * r)) {
        const double v = v0_inner(p, k, q, r);
        ms = std::min(ms, -v / (q * r));
        if (r >= 3.0) {
            const double L = std::log(r);
            Mv = std::max(Mv, std::fabs(v) * r / (aq * L));
            Mdv = std::max(Mdv, std::fabs(dv0_inner(p, k, q, r)) * r * r / (aq * L));
        }
    }
    rep.M_v = Mv;
    rep.M_dv = Mdv;
    rep.margin_v_sign = ms;
    rep.slope0 = -v0_inner(p, k, q, 1e-4 * p.h) / (q * 1e-4 * p.h);
    rep.pass = mf > 0 && mdf > 0 && ms > 0 && rep.slope0 > 0 && std::isfinite(Mv) && std::isfinite(Mdv);
    return rep;
}

} // namespace spiral
