#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "logscale.hpp"
#include "quadrature.hpp"

namespace spiral {

inline constexpr double euler_gamma = 0.57721566490153286060651209;
inline constexpr long double euler_gamma_l = 0.57721566490153286060651209008240243L;
inline constexpr long double pi_l = 3.14159265358979323846264338327950288L;

enum class BesselMethod { series, asymptotic, quadrature };

inline const char* to_string(BesselMethod m)
{
    switch (m) {
    case BesselMethod::series: return "series";
    case BesselMethod::asymptotic: return "asymptotic";
    case BesselMethod::quadrature: return "quadrature";
    }
    return "?";
}

/// K_{i nu}(x) with first and second x-derivatives.
struct ImagOrderEval {
    double x = 0.0;
    double nu = 0.0;
    double value = 0.0;
    double derivative = 0.0;
    double second = 0.0;
    BesselMethod method = BesselMethod::series;
    double err_estimate = 0.0;
};

struct GammaArg {
    int k = 0;
    double nu = 0.0;
    double theta = 0.0;
};

struct SpecfunOptions {
    double x_split = 11.0;  ///< from calibrate_x_split over nu in [0, 0.5]
    int max_terms = 200;
    double asym_min_x = 5.0; ///< below this the asymptotic branch refuses
};

namespace detail {

/// arg Gamma(1 + i nu) on the continuous branch through 0.
inline long double theta0(long double nu)
{
    if (nu == 0.0L) return 0.0L;
    // Gamma(1+i nu) = Gamma(N+1+i nu) / prod_{l=1}^{N} (l + i nu)
    constexpr int N = 16;
    const std::complex<long double> z(N + 1.0L, nu);
    static constexpr long double bern[] = {1.0L / 6,      -1.0L / 30,    1.0L / 42,
                                           -1.0L / 30,    5.0L / 66,     -691.0L / 2730,
                                           7.0L / 6,      -3617.0L / 510};
    std::complex<long double> lg = (z - 0.5L) * std::log(z) - z;
    std::complex<long double> zp = z;
    const std::complex<long double> z2 = z * z;
    for (int m = 1; m <= 8; ++m) {
        lg += bern[m - 1] / (static_cast<long double>(2 * m) * (2 * m - 1) * zp);
        zp *= z2;
    }
    long double s = 0.0L, comp = 0.0L;
    for (int l = 1; l <= N; ++l) {
        const long double y = std::atan(nu / l) - comp;
        const long double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return lg.imag() - s;
}

/// theta_{k,nu} = theta_0 + sum_{l<=k} atan(nu/l), Kahan summed.
inline long double theta_k(int k, long double nu)
{
    long double s = theta0(nu), comp = 0.0L;
    for (int l = 1; l <= k; ++l) {
        const long double y = std::atan(nu / l) - comp;
        const long double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

} // namespace detail

/// theta_{k,nu} = arg Gamma(1 + k + i nu).
inline GammaArg gamma_arg(int k, double nu)
{
    if (k < 0) throw DomainError("gamma_arg: k must be nonnegative");
    if (!(nu >= 0.0)) throw DomainError("gamma_arg: nu must be nonnegative");
    return {k, nu, static_cast<double>(detail::theta_k(k, nu))};
}

/// Power series of K_{i nu} about x = 0 (long double internally).
inline ImagOrderEval k_imag_series(double nu, double x, const SpecfunOptions& opt = {})
{
    if (!(x > 0.0)) throw DomainError("k_imag_series: x must be positive, got " + num(x));
    if (!(nu >= 0.0) || nu > 1.0)
        throw DomainError("k_imag_series: nu must lie in [0, 1], got " + num(nu));
    const long double X = x, V = nu;
    const long double lx = std::log(X / 2.0L);
    const long double t = X * X / 4.0L;
    const long double P =
        V == 0.0L ? 1.0L : std::sqrt(V * pi_l / std::sinh(V * pi_l));

    long double theta = detail::theta0(V), comp = 0.0L;
    long double harmonic = 0.0L;
    long double T_over_D = 1.0L; // (x^2/4)^k / D_k
    long double s0 = 0.0L, s1 = 0.0L, s2 = 0.0L;
    long double mag = 0.0L;
    int k = 0;
    for (;; ++k) {
        if (k > 0) {
            const long double y = std::atan(V / k) - comp;
            const long double tt = theta + y;
            comp = (tt - theta) - y;
            theta = tt;
            harmonic += 1.0L / k;
            T_over_D *= t / (k * std::sqrt(static_cast<long double>(k) * k + V * V));
        }
        long double sk, ck;
        if (V == 0.0L) {
            sk = lx + euler_gamma_l - harmonic;
            ck = 1.0L;
        } else {
            const long double phi = V * lx - theta;
            sk = std::sin(phi) / V;
            ck = std::cos(phi);
        }
        const long double a0 = T_over_D * sk;
        const long double a1 = T_over_D * (2 * k * sk + ck);
        const long double a2 =
            T_over_D * ((4.0L * k * k - 2.0L * k - V * V) * sk + (4.0L * k - 1.0L) * ck);
        s0 += a0;
        s1 += a1;
        s2 += a2;
        mag = std::max(mag, std::fabs(a0));
        const long double tail = T_over_D * (std::fabs(sk) + 1.0L) * (1.0L + 4.0L * k);
        if (k > X && tail < 1e-21L * (std::fabs(s0) + std::fabs(s1)))
            break;
        if (k >= opt.max_terms)
            throw ConvergenceError("k_imag_series: no convergence within " +
                                   std::to_string(opt.max_terms) + " terms at x=" +
                                   num(x) + ", nu=" + num(nu));
    }
    ImagOrderEval r;
    r.x = x;
    r.nu = nu;
    r.value = static_cast<double>(-P * s0);
    r.derivative = static_cast<double>(-P * s1 / X);
    r.second = static_cast<double>(-P * s2 / (X * X));
    r.method = BesselMethod::series;
    // cancellation in the alternating sum sets the attainable accuracy
    r.err_estimate = static_cast<double>(
        std::numeric_limits<long double>::epsilon() * 8 * (mag + 1) /
        std::max(std::fabs(s0), std::numeric_limits<long double>::min()));
    return r;
}

/// Scaled asymptotic sums: value = sqrt(pi/2) e^{-x} * s0, etc.
struct AsymSums {
    long double s0 = 0, s1 = 0, s2 = 0;
    long double rel_err = 0;
};

namespace detail {

inline AsymSums k_imag_asym_sums(long double nu, long double x, int max_terms)
{
    AsymSums out;
    long double a = 1.0L;
    long double xp = 1.0L / std::sqrt(x); // x^{-k-1/2}
    long double prev = std::numeric_limits<long double>::infinity();
    for (int k = 0; k <= max_terms; ++k) {
        if (k > 0) {
            a *= (-4.0L * nu * nu - (2.0L * k - 1) * (2.0L * k - 1)) / (8.0L * k);
            xp /= x;
        }
        const long double kk = k + 0.5L;
        const long double t0 = a * xp;
        const long double mag = std::fabs(t0);
        if (mag > prev) { // optimal truncation: stop when terms start to grow
            out.rel_err = prev / std::fabs(out.s0);
            return out;
        }
        out.s0 += t0;
        out.s1 += a * (-xp - kk * xp / x);
        out.s2 += a * (xp + 2 * kk * xp / x + kk * (kk + 1) * xp / (x * x));
        prev = mag;
        if (mag < 1e-22L * std::fabs(out.s0)) {
            out.rel_err = mag / std::fabs(out.s0);
            return out;
        }
    }
    out.rel_err = prev / std::fabs(out.s0);
    return out;
}

} // namespace detail

/// Large-x expansion of K_{i nu}, optimally truncated.
inline ImagOrderEval k_imag_asym(double nu, double x, const SpecfunOptions& opt = {})
{
    if (!(x >= opt.asym_min_x))
        throw DomainError("k_imag_asym: x=" + num(x) + " below validity threshold " +
                          num(opt.asym_min_x));
    if (!(nu >= 0.0)) throw DomainError("k_imag_asym: nu must be nonnegative");
    const auto s = detail::k_imag_asym_sums(nu, x, opt.max_terms);
    const long double c = std::sqrt(pi_l / 2) * std::exp(-static_cast<long double>(x));
    ImagOrderEval r;
    r.x = x;
    r.nu = nu;
    r.value = static_cast<double>(c * s.s0);
    r.derivative = static_cast<double>(c * s.s1);
    r.second = static_cast<double>(c * s.s2);
    r.method = BesselMethod::asymptotic;
    r.err_estimate = static_cast<double>(s.rel_err);
    return r;
}

struct QuadratureValue {
    double value = 0.0;
    double err_estimate = 0.0;
};

/// K_{i nu}(x) (order 0), K' (order 1) or K'' (order 2) from
/// int_0^inf cosh(t)^m exp(-x cosh t) cos(nu t) dt, sign (-1)^m.
inline QuadratureValue k_imag_quadrature(double nu, double x, int order = 0,
                                         double rel_tol = 1e-13)
{
    if (!(x > 0.0)) throw DomainError("k_imag_quadrature: x must be positive");
    // integrate the scaled integrand exp(-x (cosh t - 1)), restore e^{-x} at the end
    const double T = std::acosh(1.0 + 745.0 / x) + 1.0;
    auto f = [&](double t) {
        const double ch = std::cosh(t);
        return std::pow(ch, order) * std::exp(-x * (ch - 1.0)) * std::cos(nu * t);
    };
    // break at the bulk scale so the adaptive pass sees the peak
    const double t1 = std::min(T, std::acosh(1.0 + 1.0 / x));
    auto a = quad::integrate(f, 0.0, t1, rel_tol * 0.1);
    auto b = quad::integrate(f, t1, T, rel_tol * 0.1, 1e-3 * rel_tol * std::fabs(a.value));
    const double scale = std::exp(-x) * (order % 2 ? -1.0 : 1.0);
    const double total = a.value + b.value;
    const double err = a.error + b.error;
    if (err > rel_tol * std::fabs(total) * 10)
        throw ConvergenceError("k_imag_quadrature: tolerance not reached, estimate " +
                               num(err / std::fabs(total)));
    return {total * scale, err / std::max(std::fabs(total), 1e-300)};
}

/// Regime dispatcher: series below x_split, asymptotic above.
inline ImagOrderEval k_imag(double nu, double x, const SpecfunOptions& opt = {})
{
    if (!(x > 0.0)) throw DomainError("k_imag: x must be positive, got " + num(x));
    if (x < opt.x_split) return k_imag_series(nu, x, opt);
    SpecfunOptions o = opt;
    o.asym_min_x = std::min(opt.asym_min_x, opt.x_split);
    return k_imag_asym(nu, x, o);
}

/// Pick the handover point minimizing the worst disagreement of the two
/// branches against the quadrature oracle (value and derivative).
inline double calibrate_x_split(const std::vector<double>& nus, const std::vector<double>& candidates)
{
    double best = candidates.front(), best_err = std::numeric_limits<double>::infinity();
    SpecfunOptions o;
    o.asym_min_x = 1.0;
    for (double xs : candidates) {
        double worst = 0.0;
        for (double nu : nus) {
            const double q0 = k_imag_quadrature(nu, xs, 0).value;
            const double q1 = k_imag_quadrature(nu, xs, 1).value;
            const auto s = k_imag_series(nu, xs, o);
            const auto a = k_imag_asym(nu, xs, o);
            worst = std::max({worst, std::fabs(s.value / q0 - 1), std::fabs(s.derivative / q1 - 1),
                              std::fabs(a.value / q0 - 1), std::fabs(a.derivative / q1 - 1)});
        }
        if (worst < best_err) {
            best_err = worst;
            best = xs;
        }
    }
    return best;
}

/// log K_{i nu}(x) for x where K > 0, safe against underflow at large x.
inline double log_k_imag(double nu, double x, const SpecfunOptions& opt = {})
{
    if (x < opt.x_split) {
        const double v = k_imag_series(nu, x, opt).value;
        if (!(v > 0.0)) throw DomainError("log_k_imag: K_{i nu}(x) not positive at x=" + num(x));
        return std::log(v);
    }
    const auto s = detail::k_imag_asym_sums(nu, x, opt.max_terms);
    return static_cast<double>(0.5L * std::log(pi_l / 2) + std::log(s.s0)) - x;
}

/// K_{i nu}'(x) / K_{i nu}(x) without forming e^{-x}.
inline double k_imag_log_derivative(double nu, double x, const SpecfunOptions& opt = {})
{
    if (x < opt.x_split) {
        const auto e = k_imag_series(nu, x, opt);
        return e.derivative / e.value;
    }
    const auto s = detail::k_imag_asym_sums(nu, x, opt.max_terms);
    return static_cast<double>(s.s1 / s.s0);
}

// ---------------------------------------------------------------------------
// integer order I_n, K_n

enum class BesselKind { I, K };

struct IntegerOrderEval {
    double value = 0.0;
    double derivative = 0.0;
    LogValue log_value;
    LogValue log_derivative;
    bool overflow = false;
};

namespace detail {

/// e^{-x} I_n(x)
inline long double scaled_I(int n, long double x)
{
    if (x <= 30.0L) {
        // positive series, no cancellation
        long double term = std::exp(n * std::log(x / 2.0L) - std::lgamma(n + 1.0L) - x);
        long double s = term;
        const long double t = x * x / 4.0L;
        for (int k = 1; k < 500; ++k) {
            term *= t / (static_cast<long double>(k) * (n + k));
            s += term;
            if (term < 1e-21L * s) break;
        }
        return s;
    }
    const long double mu = 4.0L * n * n;
    long double a = 1.0L, s = 1.0L, prev = 1.0L;
    for (int k = 1; k < 200; ++k) {
        a *= -(mu - (2.0L * k - 1) * (2.0L * k - 1)) / (8.0L * k * x);
        if (std::fabs(a) > prev) break;
        s += a;
        prev = std::fabs(a);
        if (prev < 1e-21L) break;
    }
    return s / std::sqrt(2 * pi_l * x);
}

/// e^{x} K_n(x)
inline long double scaled_K(int n, long double x)
{
    if (x > 30.0L) {
        const long double mu = 4.0L * n * n;
        long double a = 1.0L, s = 1.0L, prev = 1.0L;
        for (int k = 1; k < 200; ++k) {
            a *= (mu - (2.0L * k - 1) * (2.0L * k - 1)) / (8.0L * k * x);
            if (std::fabs(a) > prev) break;
            s += a;
            prev = std::fabs(a);
            if (prev < 1e-21L) break;
        }
        return s * std::sqrt(pi_l / (2 * x));
    }
    // trapezoid rule on int_0^inf exp(-x(cosh t - 1)) cosh(n t) dt: the
    // integrand is analytic in a strip, so the error decays like e^{-pi^2/h}
    const long double h = 0.05L;
    long double s = 0.5L;
    for (int j = 1; j < 100000; ++j) {
        const long double t = j * h;
        const long double e = -x * (std::cosh(t) - 1.0L) + n * t;
        const long double term = std::exp(-x * (std::cosh(t) - 1.0L)) * std::cosh(n * t);
        s += term;
        if (e < -60.0L && t > 1.0L) break;
    }
    return s * h;
}

} // namespace detail

/// I_n(x) or K_n(x) and first derivative; log-scale fields always set,
/// raw doubles set to +-inf (overflow=true) when not representable.
inline IntegerOrderEval bessel_integer(BesselKind kind, int n, double x)
{
    if (n < 0) throw DomainError("bessel_integer: order must be nonnegative");
    if (!(x > 0.0)) throw DomainError("bessel_integer: x must be positive");
    const long double X = x;
    IntegerOrderEval r;
    long double v, d, shift;
    if (kind == BesselKind::I) {
        v = detail::scaled_I(n, X);
        d = 0.5L * (detail::scaled_I(n == 0 ? 1 : n - 1, X) + detail::scaled_I(n + 1, X));
        shift = X;
    } else {
        v = detail::scaled_K(n, X);
        d = -0.5L * (detail::scaled_K(n == 0 ? 1 : n - 1, X) + detail::scaled_K(n + 1, X));
        shift = -X;
    }
    r.log_value = {static_cast<double>(std::log(std::fabs(v)) + shift), v > 0 ? 1 : -1};
    r.log_derivative = {static_cast<double>(std::log(std::fabs(d)) + shift), d > 0 ? 1 : -1};
    r.overflow = r.log_value.overflows() || r.log_derivative.overflows();
    r.value = r.log_value.overflows() ? r.log_value.sign * std::numeric_limits<double>::infinity()
                                      : r.log_value.to_double();
    r.derivative = r.log_derivative.overflows()
                       ? r.log_derivative.sign * std::numeric_limits<double>::infinity()
                       : r.log_derivative.to_double();
    return r;
}

/// x * (I_n' K_n - I_n K_n') - 1 evaluated in log space.
inline double wronskian_defect(int n, double x)
{
    const auto I = bessel_integer(BesselKind::I, n, x);
    const auto K = bessel_integer(BesselKind::K, n, x);
    const double a = std::exp(I.log_derivative.log_abs + K.log_value.log_abs + std::log(x));
    const double b = std::exp(I.log_value.log_abs + K.log_derivative.log_abs + std::log(x));
    return a * I.log_derivative.sign * K.log_value.sign -
           b * I.log_value.sign * K.log_derivative.sign - 1.0;
}

} // namespace spiral
