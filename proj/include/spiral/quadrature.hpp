#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "errors.hpp"

namespace spiral::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

// 15-point Kronrod abscissae (symmetric, x[7] = 0) and weights; gauss
// weights belong to the odd-indexed abscissae.
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

template <class F>
Piece gk15(F& f, double a, double b)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double rk = fc * wgk[7], rg = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        const double s = f(c - dx) + f(c + dx);
        rk += wgk[j] * s;
        if (j % 2 == 1) rg += wg[j / 2] * s;
    }
    return {a, b, rk * h, std::fabs((rk - rg) * h)};
}

} // namespace detail

/// Globally adaptive G7-K15 on [a, b]. Stops when the summed error
/// estimate is below max(abs_tol, rel_tol*|I|). Throws ConvergenceError
/// after max_intervals bisections.
template <class F>
Result integrate(F&& f, double a, double b, double rel_tol = 1e-13,
                 double abs_tol = 0.0, int max_intervals = 4000)
{
    std::priority_queue<detail::Piece> heap;
    auto first = detail::gk15(f, a, b);
    heap.push(first);
    double total = first.value, err = first.error;
    int count = 1;
    while (err > std::max(abs_tol, rel_tol * std::fabs(total))) {
        if (count >= max_intervals)
            throw ConvergenceError("quadrature: tolerance not reached, error estimate " +
                                   num(err));
        auto worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        auto left = detail::gk15(f, worst.a, m);
        auto right = detail::gk15(f, m, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
        // the running error sum drifts when pieces become tiny; resum
        if (count % 64 == 0) {
            auto copy = heap;
            err = 0.0;
            total = 0.0;
            while (!copy.empty()) {
                err += copy.top().error;
                total += copy.top().value;
                copy.pop();
            }
        }
    }
    return {total, err, count};
}

} // namespace spiral::quad
