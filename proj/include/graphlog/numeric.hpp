#pragma once

// Deterministic floating-point helpers shared by every module.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace graphlog {

// Pairwise reduction; deterministic for a fixed element order and accurate
// enough for vertex counts well beyond 1e4.
inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& xs) {
    return pairwise_sum(std::span<const double>(xs));
}

// Compensated running sum for long sequential accumulations (series partial
// sums), where the element count is data-dependent.
class KahanSum {
public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// log(s^2) evaluated as 2*log|s|, with |s| clamped below so subnormal inputs
// cannot produce -inf.
inline double log_sq(double s) {
    double a = std::fabs(s);
    if (a < 1e-300) a = 1e-300;
    return 2.0 * std::log(a);
}

// s^2 * log(s^2) with the 0*log(0) = 0 convention.
inline double sq_log_sq(double s) {
    if (s == 0.0) return 0.0;
    return s * s * log_sq(s);
}

}  // namespace graphlog
