#include "multigof/rng.hpp"

#include <cmath>

namespace mgof {

std::int64_t RngStream::binomial(std::int64_t trials, double p) {
    if (trials <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;

    double t = static_cast<double>(trials);
    std::int64_t mode = static_cast<std::int64_t>(std::floor((t + 1.0) * p));
    if (mode > trials) mode = trials;

    double log_pmf_mode = std::lgamma(t + 1.0) -
                          std::lgamma(static_cast<double>(mode) + 1.0) -
                          std::lgamma(t - static_cast<double>(mode) + 1.0) +
                          static_cast<double>(mode) * std::log(p) +
                          (t - static_cast<double>(mode)) * std::log1p(-p);
    double pmf_mode = std::exp(log_pmf_mode);

    double u = uniform();
    double cum = pmf_mode;
    if (u < cum) return mode;

    double odds = p / (1.0 - p);
    double lo_pmf = pmf_mode;
    double hi_pmf = pmf_mode;
    std::int64_t lo = mode;
    std::int64_t hi = mode;
    while (lo > 0 || hi < trials) {
        if (hi < trials) {
            hi_pmf *= odds * (t - static_cast<double>(hi)) / (static_cast<double>(hi) + 1.0);
            ++hi;
            cum += hi_pmf;
            if (u < cum) return hi;
        }
        if (lo > 0) {
            lo_pmf *= static_cast<double>(lo) / (odds * (t - static_cast<double>(lo) + 1.0));
            --lo;
            cum += lo_pmf;
            if (u < cum) return lo;
        }
    }
    // Rounding left ~1e-15 of mass unassigned; land it on the mode.
    return mode;
}

}  // namespace mgof
