#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "multigof/types.hpp"

namespace mgof {

/// Pearson's chi-squared statistic, sum_j (Y_j - n*pi0_j)^2 / (n*pi0_j).
/// Every null entry must be positive.
double pearson_chi2(const CountVector& counts, const ProbVector& pi0);

/// U-statistic for A = diag(1/w) computed from counts in O(d):
///
///   binom(n,2) * U_A = 1/2 * [ sum_j (Y_j - n*pi0_j)^2 / w_j
///                              - sum_j Y_j (1 - 2*pi0_j) / w_j
///                              - n * sum_j pi0_j^2 / w_j ]
///
/// The first sum is the full double-sum kernel identity; the rest subtracts
/// the diagonal terms h_A(X_i, X_i). Validated against u_statistic_pairwise.
double u_statistic(const CountVector& counts, const ProbVector& pi0, const WeightVector& w);

/// The same U-statistic evaluated literally as binom(n,2)^{-1} * sum over
/// pairs i < j of (X_i - pi0)^T A (X_j - pi0). O(n^2); the validation oracle
/// for u_statistic.
double u_statistic_pairwise(const SampleList& samples, const ProbVector& pi0,
                            const WeightVector& w);

/// Zelterman's statistic phi_n = chi2_n - sum_j Y_j / (n*pi0_j). Satisfies
/// phi_n = (n-1) * (U_{pi0} - 1).
double zelterman_phi(const CountVector& counts, const ProbVector& pi0);

/// Collision count W = sum_j Y_j (Y_j - 1) / 2 = number of pairs sharing a bin.
std::int64_t collision_statistic(const CountVector& counts);

/// tr{(A Sigma)^2} for A = diag(a) and Sigma = diag(pi) - pi*pi^T:
///   sum_j a_j^2 pi_j^2 - 2 sum_j a_j^2 pi_j^3 + (sum_j a_j pi_j^2)^2.
/// a may carry negative entries (needed for the A - sigma*I diagnostic).
double trace_weighted_sq(const ProbVector& pi, std::span<const double> a);

/// (pi - pi0)^T A Sigma A (pi - pi0) for A = diag(1/w):
///   sum_j d_j^2 pi_j / w_j^2 - (sum_j d_j pi_j / w_j)^2,  d = pi - pi0.
double signal_quadform(const ProbVector& pi, const ProbVector& pi0, const WeightVector& w);

/// Var(U_A) = binom(n,2)^{-1} [ tr{(A Sigma)^2} + 2(n-1) * signal quadform ].
double variance_u(const ProbVector& pi, const ProbVector& pi0, const WeightVector& w,
                  std::int64_t n);

/// E[U_A] = sum_j (pi_j - pi0_j)^2 / w_j.
double expectation_u(const ProbVector& pi, const ProbVector& pi0, const WeightVector& w);

enum class StatFamily { pearson, u_stat, zelterman, collision };

/// Which statistic to compute; weight is meaningful for u_stat only.
struct StatisticSpec {
    StatFamily family = StatFamily::u_stat;
    WeightProvenance weight{WeightKind::identity, 0.0};
};

std::string to_string(const StatisticSpec& spec);

/// Parses "pearson", "zelterman", "collision", or "u:<weight-spec>" where the
/// weight spec is one of identity | pi0 | mixture:<g> | trunc | lp:<p>.
StatisticSpec parse_statistic_spec(const std::string& text);

/// Parses a bare weight spec from the same mini-grammar.
WeightProvenance parse_weight_spec(const std::string& text);

/// Materializes a weight vector for the given null.
WeightVector make_weight(const WeightProvenance& prov, const ProbVector& pi0);

/// A computed statistic together with its context.
struct StatisticValue {
    double value = 0.0;
    StatisticSpec kind;
    std::int64_t n = 0;
    int d = 0;
};

StatisticValue evaluate_statistic(const StatisticSpec& spec, const CountVector& counts,
                                  const ProbVector& pi0);

}  // namespace mgof
