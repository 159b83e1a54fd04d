#pragma once

#include <cmath>
#include <span>

namespace mgof {

/// Kahan compensated accumulator. The trace formulas difference large
/// near-equal terms, so every bin-wise sum in the library goes through this.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = sum_ + y;
        c_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

inline double kahan_total(std::span<const double> xs) {
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

/// n choose 2 as a real number.
inline double binom2(std::int64_t n) {
    return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
}

/// |a - b| <= rel * max(|a|,|b|), falling back to an absolute tolerance
/// when both values are tiny.
inline bool close_rel(double a, double b, double rel = 1e-9, double abs_floor = 1e-12) {
    double diff = std::fabs(a - b);
    double scale = std::fmax(std::fabs(a), std::fabs(b));
    if (scale < 1e-3) return diff <= abs_floor;
    return diff <= rel * scale;
}

}  // namespace mgof
