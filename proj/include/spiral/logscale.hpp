#pragma once

#include <cmath>
#include <limits>

namespace spiral {

/// A real number stored as sign * exp(log_abs).
struct LogValue {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;

    static LogValue from(double x)
    {
        if (x == 0.0) return {};
        return {std::log(std::fabs(x)), x > 0 ? 1 : -1};
    }

    /// True if exp(log_abs) is not representable as a normal double.
    bool overflows() const { return log_abs > 709.78; }
    bool underflows() const { return sign != 0 && log_abs < -708.39; }

    double to_double() const
    {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_abs);
    }

    friend LogValue operator*(const LogValue& a, const LogValue& b)
    {
        if (a.sign == 0 || b.sign == 0) return {};
        return {a.log_abs + b.log_abs, a.sign * b.sign};
    }
    friend LogValue operator/(const LogValue& a, const LogValue& b)
    {
        if (a.sign == 0) return {};
        return {a.log_abs - b.log_abs, a.sign * b.sign};
    }
};

} // namespace spiral
