#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace tssrp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// log(1 + e^x) without overflow.
inline double log1p_exp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

/// log(e^a + e^b); either argument may be -inf.
inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == kNegInf) return a;
    return a + std::log1p(std::exp(b - a));
}

/// log(sum_i e^{v_i}). Empty input or all -inf gives -inf.
inline double log_sum_exp(std::span<const double> values) {
    double peak = kNegInf;
    for (double v : values) peak = std::max(peak, v);
    if (!std::isfinite(peak)) return peak;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - peak);
    return peak + std::log(sum);
}

/// log of a nonnegative value, with log(0) = -inf.
inline double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

}  // namespace tssrp
