#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "multigof/calibration.hpp"
#include "multigof/statistics.hpp"
#include "multigof/types.hpp"

namespace mgof {

/// A statistic kind with its weight materialized against the study null.
struct PreparedStatistic {
    StatisticSpec spec;
    std::optional<WeightVector> weight;  // set for u_stat kinds
    std::string label;
};

PreparedStatistic prepare_statistic(const StatisticSpec& spec, const ProbVector& pi0);

double evaluate_prepared(const PreparedStatistic& stat, const CountVector& counts,
                         const ProbVector& pi0);

/// Simulates all statistics on shared replicates: replicate r of scenario s
/// samples counts from `sample_dist` using RngStream::substream(seed, s, r)
/// and evaluates every statistic against pi0. result[k][r] is statistic k on
/// replicate r, so output is identical for any thread count.
std::vector<std::vector<double>> simulate_statistics(
    const ProbVector& sample_dist, const ProbVector& pi0,
    const std::vector<PreparedStatistic>& stats, std::int64_t n, int reps,
    std::uint64_t seed, std::uint64_t scenario_id, int threads = 1);

/// Order statistic at rank ceil((1-alpha)*reps) of the sorted null sample.
double null_quantile(std::vector<double> null_stats, double alpha);

struct Alternative {
    std::string label;
    ProbVector pi;
    double r = std::numeric_limits<double>::quiet_NaN();  // echoed in reports
};

struct PowerStudyConfig {
    ProbVector null_pi;
    std::string null_label;
    std::vector<Alternative> alternatives;
    std::int64_t n = 0;
    int reps = 0;
    double alpha = 0.05;
    std::vector<StatisticSpec> statistics;
    Calibration calibration = Calibration::monte_carlo;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct PowerCell {
    std::string statistic;
    std::string alternative;
    double r = std::numeric_limits<double>::quiet_NaN();
    double null_quantile = 0.0;  // critical value in the statistic's own units
    double empirical_power = 0.0;
    double standard_error = 0.0;
    int reps = 0;
};

struct PowerStudyReport {
    std::int64_t n = 0;
    int d = 0;
    int reps = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    Calibration calibration = Calibration::monte_carlo;
    std::string null_label;
    std::vector<PowerCell> cells;
};

/// Estimates each statistic's critical value from `reps` null replicates
/// (scenario 0), then the rejection rate under each alternative from fresh
/// replicates (scenario 1 + k). Fully deterministic given the seed.
PowerStudyReport run_power_study(const PowerStudyConfig& config);

/// The bias demonstration: null pi0_i proportional to i, alternative pi_i
/// proportional to i^5, Pearson versus U_{pi0}.
PowerStudyReport bias_demo(std::int64_t n = 800, int d = 4000, int reps = 1000,
                           std::uint64_t seed = 1, double alpha = 0.05, int threads = 1);

struct TheoryComparisonRow {
    int d = 0;
    std::string statistic;
    double empirical = 0.0;
    double theoretical = 0.0;
    double null_quantile = 0.0;
    double standard_error = 0.0;
};

/// Empirical Monte-Carlo power versus the full-form normal approximation for
/// U_{pi0}, U_I and U_mix across a dimension grid, null pi0_i proportional
/// to i, alternative proportional to i^r.
std::vector<TheoryComparisonRow> theory_vs_empirical(std::int64_t n,
                                                     const std::vector<int>& d_grid, double r,
                                                     int reps, double alpha,
                                                     std::uint64_t seed, int threads = 1);

enum class FidelityTarget { poisson, gaussian };

struct FidelityResult {
    FidelityTarget target = FidelityTarget::poisson;
    double distance = 0.0;  // TV for poisson, KS for gaussian
    double eta0 = 0.0;      // Poisson reference mean (poisson target)
    double null_trace = 0.0;  // tr{(Sigma0)^2} standardizer (gaussian target)
    std::int64_t n = 0;
    int d = 0;
    int reps = 0;
    std::uint64_t seed = 0;
};

/// Distributional fidelity of the null statistic: total-variation distance of
/// the collision count against Pois(eta0_hat), or Kolmogorov-Smirnov distance
/// of the standardized U_I against the standard normal.
FidelityResult fidelity_check(const ProbVector& pi0, std::int64_t n, int reps,
                              FidelityTarget target, std::uint64_t seed, int threads = 1);

}  // namespace mgof
