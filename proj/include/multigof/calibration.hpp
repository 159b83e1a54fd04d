#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "multigof/statistics.hpp"
#include "multigof/types.hpp"

namespace mgof {

enum class Calibration { poisson, gaussian, chebyshev, monte_carlo };

std::string to_string(Calibration c);
Calibration parse_calibration(const std::string& text);

/// Outcome of a calibrated test. reject is strict exceedance of the critical
/// value; the Chebyshev calibration carries no p-value.
struct TestResult {
    double statistic = 0.0;
    Calibration calibration = Calibration::monte_carlo;
    double critical_value = 0.0;
    std::optional<double> p_value;
    bool reject = false;
    double alpha = 0.0;
    std::int64_t n = 0;
    int d = 0;
    std::string weight_provenance;
};

/// Finite-n plug-ins for the Poisson-regime means:
/// eta1 = binom(n,2) pi^T pi, eta0 = binom(n,2) pi0^T pi0,
/// eta2 = binom(n,2) pi^T pi0.
struct PoissonReference {
    double eta1 = 0.0;
    double eta0 = 0.0;
    double eta2 = 0.0;
};

PoissonReference poisson_reference(const ProbVector& pi, const ProbVector& pi0, std::int64_t n);

/// Smallest integer c >= 0 with P(Pois(eta0) > c) <= alpha.
std::int64_t poisson_critical_value(double eta0, double alpha);

/// Poisson-regime test: statistic is the collision count W referenced against
/// Pois(eta0_hat). For a uniform null this is exactly the rule on
/// binom(n,2) (U_I + 1/d).
TestResult poisson_test(const CountVector& counts, const ProbVector& pi0, double alpha);

/// P(Pois(eta1) > c_alpha), the Poisson-regime power approximation.
double poisson_power(double eta1, std::int64_t c_alpha);

/// Stein-Chen total-variation bound between the collision count and its
/// Poisson reference: 2 n^3 (1 - e^{-eta}) / eta * [sum pi^3 + (sum pi^2)^2].
double tv_bound(const ProbVector& pi, std::int64_t n);

/// Gaussian-regime test: sqrt(binom(n,2)) U_A / sqrt(tr{(A Sigma0)^2})
/// against the upper-alpha normal quantile.
TestResult gaussian_test(const CountVector& counts, const ProbVector& pi0,
                         const WeightVector& w, double alpha);

enum class PowerForm { full, strong_signal, weak_signal };

/// Normal-approximation power. The full form uses
/// Phi(-sqrt(L0/(L1+L2)) z_a + sqrt(binom(n,2)) ||A^{1/2}D||^2 / sqrt(L1+L2))
/// with L0 = tr{(A Sigma0)^2}, L1 = tr{(A Sigma)^2},
/// L2 = 2(n-1) D^T A Sigma A D.
double gaussian_power(const ProbVector& pi0, const ProbVector& pi, const WeightVector& w,
                      std::int64_t n, double alpha, PowerForm form);

/// Chebyshev-calibrated minimax test: rejects when
/// U_w > sqrt((1/alpha) binom(n,2)^{-1} tr{(A_w Sigma0)^2}). No p-value.
TestResult minimax_test(const CountVector& counts, const ProbVector& pi0,
                        const WeightVector& w, double alpha);

struct SeparationPlan {
    double eps_sq_required = 0.0;  // C sqrt(d)/n (1/sqrt(alpha) + 1/zeta)
    double minimax_rate = 0.0;     // d^{1/4} / sqrt(n)
};

SeparationPlan separation_planner(std::int64_t d, std::int64_t n, double alpha, double zeta,
                                  double C);

enum class Regime { poisson, gaussian_null, gaussian_strong_signal, gaussian_weak_signal };

std::string to_string(Regime r);

/// Finite-sample cutoffs for the regime suggestion. The asymptotic theory
/// gives only limits, so these are heuristics and callers may move them.
struct RegimeThresholds {
    double p1_max = 0.1;
    double eta0_max = 10.0;
    double snr_cut = 1.0;
};

/// Kernel moments under pi for the diagonal kernel with entries a:
/// h4 = E[h(X1,X2)^4], h2h2 = E[h(X1,X2)^2 h(X1,X3)^2]. Exact O(d^2) sums.
struct KernelMoments {
    double h4 = 0.0;
    double h2h2 = 0.0;
};

KernelMoments kernel_moments(const ProbVector& pi, const ProbVector& pi0,
                             std::span<const double> a);

/// Dimension cap for the dense tr{(A Sigma)^4} evaluation.
inline constexpr int kDenseTraceCap = 2000;

struct RegimeDiagnostics {
    double p1 = 0.0;  // n^3 { sum pi^3 + (pi^T pi)^2 }
    PoissonReference p2;
    double p3 = 0.0;  // n^3 { sum pi pi0^2 - (sum pi pi0)^2 }
    std::optional<double> trace_ratio;  // absent above kDenseTraceCap
    std::string trace_ratio_note;            // capability note when absent
    double moment_ratio = 0.0;
    double snr = 0.0;
    double scalar_weight_gap = 0.0;  // n^2 tr{(D_sigma Sigma)^2}
    Regime suggested_regime = Regime::gaussian_null;
    std::string regime_note;  // flags near-threshold calls
};

/// Fills every diagnostic; the dense trace ratio is refused (field absent,
/// note set) for d > kDenseTraceCap while everything else is still populated.
RegimeDiagnostics regime_diagnostics(const ProbVector& pi, const ProbVector& pi0,
                                     const WeightVector& w, std::int64_t n, double sigma,
                                     const RegimeThresholds& thresholds = {});

/// Monte-Carlo calibrated test: simulates `reps` null statistics under pi0
/// with the substream contract, takes the ceil((1-alpha)*reps)-th order
/// statistic as the critical value, rejects on strict exceedance, and reports
/// p = (1 + #{null >= observed}) / (reps + 1).
TestResult empirical_quantile_calibrated_test(const CountVector& counts, const ProbVector& pi0,
                                              const StatisticSpec& kind, double alpha, int reps,
                                              std::uint64_t seed, int threads = 1);

}  // namespace mgof
