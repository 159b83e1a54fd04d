#include "multigof/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "multigof/numeric.hpp"

namespace mgof {

ProbVector power_law(int d, double r) {
    if (d < 1) fail("invalid_dimension", "power_law needs at least one bin");
    if (!(r >= 0.0)) fail("domain", "power_law exponent must be non-negative");
    std::vector<double> v(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        v[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i + 1), r);
    }
    return ProbVector(std::move(v));
}

ProbVector piecewise_uniform(int d, double omega1) {
    if (d < 1 || d % 2 != 0) {
        fail("invalid_dimension", "piecewise_uniform needs an even number of bins");
    }
    if (!(omega1 > 0.0 && omega1 < 2.0)) {
        fail("domain", "piecewise_uniform needs omega1 in (0, 2)");
    }
    double omega2 = 2.0 - omega1;
    std::vector<double> v(static_cast<std::size_t>(d));
    for (int i = 0; i < d / 2; ++i) v[static_cast<std::size_t>(i)] = omega1 / d;
    for (int i = d / 2; i < d; ++i) v[static_cast<std::size_t>(i)] = omega2 / d;
    return ProbVector(std::move(v));
}

WeightVector mixture_weight(const ProbVector& pi0, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) fail("domain", "mixture gamma must lie in (0, 1)");
    int d = pi0.dim();
    std::vector<double> w(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        w[static_cast<std::size_t>(j)] = gamma * pi0[j] + (1.0 - gamma) / d;
    }
    return WeightVector(std::move(w), {WeightKind::mixture, gamma});
}

WeightVector truncated_weight(const ProbVector& pi0) {
    int d = pi0.dim();
    std::vector<double> w(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        w[static_cast<std::size_t>(j)] = std::max(pi0[j], 1.0 / d);
    }
    return WeightVector(std::move(w), {WeightKind::truncated, 0.0});
}

WeightVector lp_mixture_weight(const ProbVector& pi0, double p) {
    if (std::isnan(p) || p < 1.0) fail("domain", "lp weight needs p >= 1");
    if (std::isinf(p)) return truncated_weight(pi0);
    int d = pi0.dim();
    std::vector<double> w(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        // Factor out the larger argument so pi0_j^p cannot underflow.
        double hi = std::max(pi0[j], 1.0 / d);
        double lo = std::min(pi0[j], 1.0 / d);
        double ratio = lo / hi;
        w[static_cast<std::size_t>(j)] =
            hi * std::pow((1.0 + std::pow(ratio, p)) / 2.0, 1.0 / p);
    }
    return WeightVector(std::move(w), {WeightKind::lp, p});
}

ComparabilityConstants comparability_constants(const WeightVector& w, const ProbVector& pi0,
                                               double gamma) {
    require_same_dim(w.dim(), pi0.dim(), "comparability_constants");
    if (!(gamma > 0.0 && gamma < 1.0)) fail("domain", "mixture gamma must lie in (0, 1)");
    int d = pi0.dim();
    double c1 = std::numeric_limits<double>::infinity();
    double c2 = 0.0;
    for (int j = 0; j < d; ++j) {
        double mix = gamma * pi0[j] + (1.0 - gamma) / d;
        double ratio = w[j] / mix;
        c1 = std::min(c1, ratio);
        c2 = std::max(c2, ratio);
    }
    return {c1, c2};
}

CountVector sample_counts(const ProbVector& pi, std::int64_t n, RngStream& rng) {
    if (n < 1) fail("domain", "sample size must be positive");
    int d = pi.dim();
    const auto& v = pi.values();
    std::vector<std::int64_t> counts(static_cast<std::size_t>(d), 0);

    // Suffix masses in extended precision keep the conditional probabilities
    // honest when d is large.
    std::vector<double> tail(static_cast<std::size_t>(d));
    long double acc = 0.0L;
    for (int j = d - 1; j >= 0; --j) {
        acc += v[static_cast<std::size_t>(j)];
        tail[static_cast<std::size_t>(j)] = static_cast<double>(acc);
    }

    std::int64_t remaining = n;
    for (int j = 0; j < d - 1 && remaining > 0; ++j) {
        double t = tail[static_cast<std::size_t>(j)];
        double p = t > 0.0 ? v[static_cast<std::size_t>(j)] / t : 0.0;
        if (p > 1.0) p = 1.0;
        std::int64_t c = rng.binomial(remaining, p);
        counts[static_cast<std::size_t>(j)] = c;
        remaining -= c;
    }
    if (remaining > 0) counts[static_cast<std::size_t>(d - 1)] = remaining;
    return CountVector(std::move(counts));
}

SampleList sample_bins(const ProbVector& pi, int n, RngStream& rng) {
    if (n < 1) fail("domain", "sample size must be positive");
    int d = pi.dim();
    std::vector<std::int32_t> bins(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        double cum = 0.0;
        std::int32_t pick = static_cast<std::int32_t>(d - 1);
        for (int j = 0; j < d; ++j) {
            cum += pi[j];
            if (u < cum) {
                pick = static_cast<std::int32_t>(j);
                break;
            }
        }
        bins[static_cast<std::size_t>(i)] = pick;
    }
    return SampleList(d, std::move(bins));
}

}  // namespace mgof
