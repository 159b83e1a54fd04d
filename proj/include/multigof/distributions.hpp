#pragma once

#include <cstdint>

#include "multigof/rng.hpp"
#include "multigof/types.hpp"

namespace mgof {

/// Power-law distribution: entry i proportional to i^r, bins 1-indexed.
/// r = 0 gives the uniform distribution.
ProbVector power_law(int d, double r);

/// Piecewise uniform: first d/2 entries omega1/d, last d/2 entries omega2/d
/// with omega2 = 2 - omega1 so the vector is a distribution. d must be even.
ProbVector piecewise_uniform(int d, double omega1);

/// Mixture weight w_j = gamma * pi0_j + (1 - gamma) / d for gamma in (0, 1).
WeightVector mixture_weight(const ProbVector& pi0, double gamma);

/// Truncated weight w_j = max(pi0_j, 1/d).
WeightVector truncated_weight(const ProbVector& pi0);

/// lp-type mixture weight w_j = ((pi0_j^p + (1/d)^p) / 2)^(1/p) for p >= 1;
/// p = infinity returns the truncated weight.
WeightVector lp_mixture_weight(const ProbVector& pi0, double p);

struct ComparabilityConstants {
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Tightest constants with C1 * pi_mix^(gamma) <= w <= C2 * pi_mix^(gamma)
/// entrywise, witnessing the comparability condition.
ComparabilityConstants comparability_constants(const WeightVector& w, const ProbVector& pi0,
                                               double gamma);

/// Exact multinomial counts via the sequential conditional-binomial
/// decomposition, O(d + n) per call. Deterministic given the stream state.
CountVector sample_counts(const ProbVector& pi, std::int64_t n, RngStream& rng);

/// n categorical draws (inverse-CDF per draw, O(n*d)); intended for oracles
/// and small tests, not the simulation hot path.
SampleList sample_bins(const ProbVector& pi, int n, RngStream& rng);

}  // namespace mgof
