#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace spiral::interp {

/// Piecewise Hermite interpolant on ascending nodes. Cubic when only
/// first derivatives are given, quintic when second derivatives are too.
class Hermite {
public:
    Hermite() = default;
    Hermite(std::vector<double> x, std::vector<double> y, std::vector<double> dy,
            std::vector<double> ddy = {})
        : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)), ddy_(std::move(ddy))
    {
        if (x_.size() < 2 || y_.size() != x_.size() || dy_.size() != x_.size() ||
            (!ddy_.empty() && ddy_.size() != x_.size()))
            throw ConfigError("Hermite: inconsistent node arrays");
    }

    double lo() const { return x_.front(); }
    double hi() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

    double operator()(double t) const { return eval(t, 0); }
    double derivative(double t) const { return eval(t, 1); }

    /// value (order 0) or derivative (order 1) at t
    double eval(double t, int order) const
    {
        if (t < x_.front() || t > x_.back())
            throw DomainError("Hermite: evaluation point " + num(t) +
                              " outside [" + num(x_.front()) + ", " +
                              num(x_.back()) + "]");
        std::size_t i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
        i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
        const double h = x_[i + 1] - x_[i];
        const double s = (t - x_[i]) / h;
        const double y0 = y_[i], y1 = y_[i + 1];
        const double d0 = dy_[i] * h, d1 = dy_[i + 1] * h;
        if (ddy_.empty()) {
            const double s2 = s * s, s3 = s2 * s;
            if (order == 0)
                return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0 +
                       (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * d1;
            return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * d0 +
                    (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * d1) / h;
        }
        const double e0 = ddy_[i] * h * h, e1 = ddy_[i + 1] * h * h;
        const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
        if (order == 0) {
            const double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
            const double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
            const double h2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
            const double h3 = 10 * s3 - 15 * s4 + 6 * s5;
            const double h4 = -4 * s3 + 7 * s4 - 3 * s5;
            const double h5 = 0.5 * (s3 - 2 * s4 + s5);
            return h0 * y0 + h1 * d0 + h2 * e0 + h3 * y1 + h4 * d1 + h5 * e1;
        }
        const double h0 = -30 * s2 + 60 * s3 - 30 * s4;
        const double h1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
        const double h2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
        const double h3 = 30 * s2 - 60 * s3 + 30 * s4;
        const double h4 = -12 * s2 + 28 * s3 - 15 * s4;
        const double h5 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
        return (h0 * y0 + h1 * d0 + h2 * e0 + h3 * y1 + h4 * d1 + h5 * e1) / h;
    }

private:
    std::vector<double> x_, y_, dy_, ddy_;
};

} // namespace spiral::interp
