#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace spiral::fd {

/// Fornberg's algorithm: weights c[j][m] such that
/// d^m u/dx^m (x0) ~= sum_j c[j][m] u(x[j]), for m = 0..max_order.
inline std::vector<std::vector<double>> fornberg(double x0, const std::vector<double>& x,
                                                 int max_order)
{
    const std::size_t n = x.size();
    std::vector<std::vector<long double>> c(n, std::vector<long double>(max_order + 1, 0.0L));
    long double c1 = 1.0L, c4 = x[0] - x0;
    c[0][0] = 1.0L;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), max_order);
        long double c2 = 1.0L;
        const long double c5 = c4;
        c4 = x[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const long double c3 = static_cast<long double>(x[i]) - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<std::vector<double>> out(n, std::vector<double>(max_order + 1));
    for (std::size_t j = 0; j < n; ++j)
        for (int k = 0; k <= max_order; ++k) out[j][k] = static_cast<double>(c[j][k]);
    return out;
}

/// Weights w[j] with int_a^b p(x) dx = sum_j w[j] u(x[j]) for the
/// interpolating polynomial p through (x[j], u[j]).
inline std::vector<double> integration_weights(const std::vector<double>& x, double a, double b)
{
    const int n = static_cast<int>(x.size());
    // shift/scale to keep the moment system well conditioned
    const double c = 0.5 * (a + b);
    double s = 0.0;
    for (double xi : x) s = std::max(s, std::abs(xi - c));
    s = std::max(s, 0.5 * std::abs(b - a));
    using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    Mat V(n, n);
    Vec mom(n);
    const long double ta = (a - c) / s, tb = (b - c) / s;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) V(k, j) = std::pow(static_cast<long double>((x[j] - c) / s), k);
        mom(k) = (std::pow(tb, k + 1) - std::pow(ta, k + 1)) / (k + 1) * s;
    }
    Vec w = V.fullPivLu().solve(mom);
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = static_cast<double>(w(j));
    return out;
}

} // namespace spiral::fd
