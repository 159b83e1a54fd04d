#include "multigof/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "multigof/distributions.hpp"
#include "multigof/numeric.hpp"
#include "multigof/rng.hpp"
#include "multigof/special.hpp"

namespace mgof {

namespace {

void run_replicates(int reps, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, std::min(threads, reps));
    if (threads == 1) {
        for (int r = 0; r < reps; ++r) body(r);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        int lo = static_cast<int>(static_cast<std::int64_t>(reps) * t / threads);
        int hi = static_cast<int>(static_cast<std::int64_t>(reps) * (t + 1) / threads);
        workers.emplace_back([lo, hi, &body] {
            for (int r = lo; r < hi; ++r) body(r);
        });
    }
    for (auto& w : workers) w.join();
}

// Critical value in the statistic's own units for analytic calibrations.
double analytic_critical(const PreparedStatistic& stat, const ProbVector& pi0,
                         std::int64_t n, double alpha, Calibration calibration) {
    switch (calibration) {
        case Calibration::poisson: {
            PoissonReference ref = poisson_reference(pi0, pi0, n);
            return static_cast<double>(poisson_critical_value(ref.eta0, alpha));
        }
        case Calibration::gaussian: {
            std::vector<double> a = stat.weight->inverse();
            double trace0 = trace_weighted_sq(pi0, a);
            if (!(trace0 > 0.0)) fail("zero_variance", "gaussian calibration: degenerate null");
            return normal_upper_quantile(alpha) * std::sqrt(trace0 / binom2(n));
        }
        case Calibration::chebyshev: {
            std::vector<double> a = stat.weight->inverse();
            double trace0 = trace_weighted_sq(pi0, a);
            return std::sqrt(trace0 / (alpha * binom2(n)));
        }
        case Calibration::monte_carlo: break;
    }
    fail("validation", "monte_carlo calibration has no analytic critical value");
}

std::vector<std::string> validate_config(const PowerStudyConfig& config) {
    std::vector<std::string> violations;
    if (config.reps < 100) violations.push_back("reps must be at least 100");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        violations.push_back("alpha must lie in (0, 1)");
    }
    if (config.n < 2) violations.push_back("n must be at least 2");
    if (config.statistics.empty()) violations.push_back("at least one statistic is required");
    if (config.alternatives.empty()) violations.push_back("at least one alternative is required");
    for (const auto& alt : config.alternatives) {
        if (alt.pi.dim() != config.null_pi.dim()) {
            violations.push_back("alternative '" + alt.label + "' has mismatched dimension");
        }
    }
    for (const auto& spec : config.statistics) {
        bool u_kind = spec.family == StatFamily::u_stat;
        if (config.calibration == Calibration::poisson && spec.family != StatFamily::collision) {
            violations.push_back("poisson calibration applies to the collision statistic only");
        }
        if ((config.calibration == Calibration::gaussian ||
             config.calibration == Calibration::chebyshev) &&
            !u_kind) {
            violations.push_back("gaussian/chebyshev calibrations apply to u-statistics only");
        }
    }
    return violations;
}

}  // namespace

PreparedStatistic prepare_statistic(const StatisticSpec& spec, const ProbVector& pi0) {
    PreparedStatistic out;
    out.spec = spec;
    out.label = to_string(spec);
    if (spec.family == StatFamily::u_stat) {
        out.weight = make_weight(spec.weight, pi0);
    }
    if (spec.family == StatFamily::pearson || spec.family == StatFamily::zelterman) {
        for (double v : pi0.values()) {
            if (v <= 0.0) {
                fail("zero_null_entry",
                     out.label + " requires every null entry to be positive");
            }
        }
    }
    return out;
}

double evaluate_prepared(const PreparedStatistic& stat, const CountVector& counts,
                         const ProbVector& pi0) {
    switch (stat.spec.family) {
        case StatFamily::pearson: return pearson_chi2(counts, pi0);
        case StatFamily::zelterman: return zelterman_phi(counts, pi0);
        case StatFamily::collision:
            return static_cast<double>(collision_statistic(counts));
        case StatFamily::u_stat: return u_statistic(counts, pi0, *stat.weight);
    }
    fail("domain", "unknown statistic family");
}

std::vector<std::vector<double>> simulate_statistics(
    const ProbVector& sample_dist, const ProbVector& pi0,
    const std::vector<PreparedStatistic>& stats, std::int64_t n, int reps,
    std::uint64_t seed, std::uint64_t scenario_id, int threads) {
    if (reps < 1) fail("domain", "reps must be positive");
    std::vector<std::vector<double>> out(stats.size(),
                                         std::vector<double>(static_cast<std::size_t>(reps)));
    run_replicates(reps, threads, [&](int r) {
        RngStream rng = RngStream::substream(seed, scenario_id, static_cast<std::uint64_t>(r));
        CountVector counts = sample_counts(sample_dist, n, rng);
        for (std::size_t k = 0; k < stats.size(); ++k) {
            out[k][static_cast<std::size_t>(r)] = evaluate_prepared(stats[k], counts, pi0);
        }
    });
    return out;
}

double null_quantile(std::vector<double> null_stats, double alpha) {
    if (null_stats.empty()) fail("domain", "null quantile of an empty sample");
    std::sort(null_stats.begin(), null_stats.end());
    double reps = static_cast<double>(null_stats.size());
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * reps));
    if (rank < 1) rank = 1;
    if (rank > null_stats.size()) rank = null_stats.size();
    return null_stats[rank - 1];
}

PowerStudyReport run_power_study(const PowerStudyConfig& config) {
    std::vector<std::string> violations = validate_config(config);
    if (!violations.empty()) {
        std::string joined;
        for (const auto& v : violations) {
            if (!joined.empty()) joined += "; ";
            joined += v;
        }
        fail("validation", joined);
    }

    std::vector<PreparedStatistic> stats;
    stats.reserve(config.statistics.size());
    for (const auto& spec : config.statistics) {
        stats.push_back(prepare_statistic(spec, config.null_pi));
    }

    std::vector<double> critical(stats.size());
    if (config.calibration == Calibration::monte_carlo) {
        auto null_stats = simulate_statistics(config.null_pi, config.null_pi, stats, config.n,
                                              config.reps, config.seed, 0, config.threads);
        for (std::size_t k = 0; k < stats.size(); ++k) {
            critical[k] = null_quantile(std::move(null_stats[k]), config.alpha);
        }
    } else {
        for (std::size_t k = 0; k < stats.size(); ++k) {
            critical[k] =
                analytic_critical(stats[k], config.null_pi, config.n, config.alpha,
                                  config.calibration);
        }
    }

    PowerStudyReport report;
    report.n = config.n;
    report.d = config.null_pi.dim();
    report.reps = config.reps;
    report.alpha = config.alpha;
    report.seed = config.seed;
    report.calibration = config.calibration;
    report.null_label = config.null_label;

    for (std::size_t ai = 0; ai < config.alternatives.size(); ++ai) {
        const Alternative& alt = config.alternatives[ai];
        auto alt_stats = simulate_statistics(alt.pi, config.null_pi, stats, config.n,
                                             config.reps, config.seed, 1 + ai, config.threads);
        for (std::size_t k = 0; k < stats.size(); ++k) {
            std::int64_t rejects = 0;
            for (double v : alt_stats[k]) {
                if (v > critical[k]) ++rejects;
            }
            double power = static_cast<double>(rejects) / config.reps;
            PowerCell cell;
            cell.statistic = stats[k].label;
            cell.alternative = alt.label;
            cell.r = alt.r;
            cell.null_quantile = critical[k];
            cell.empirical_power = power;
            cell.standard_error = std::sqrt(power * (1.0 - power) / config.reps);
            cell.reps = config.reps;
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

PowerStudyReport bias_demo(std::int64_t n, int d, int reps, std::uint64_t seed, double alpha,
                           int threads) {
    PowerStudyConfig config{
        .null_pi = power_law(d, 1.0),
        .null_label = "powerlaw:" + std::to_string(d) + ":1",
        .alternatives = {Alternative{"powerlaw:" + std::to_string(d) + ":5", power_law(d, 5.0),
                                     5.0}},
        .n = n,
        .reps = reps,
        .alpha = alpha,
        .statistics = {{StatFamily::pearson, {}},
                       {StatFamily::u_stat, {WeightKind::pi0_inverse, 0.0}}},
        .calibration = Calibration::monte_carlo,
        .seed = seed,
        .threads = threads,
    };
    return run_power_study(config);
}

std::vector<TheoryComparisonRow> theory_vs_empirical(std::int64_t n,
                                                     const std::vector<int>& d_grid, double r,
                                                     int reps, double alpha,
                                                     std::uint64_t seed, int threads) {
    if (d_grid.empty()) fail("validation", "theory_vs_empirical needs a non-empty d grid");
    std::vector<StatisticSpec> kinds = {
        {StatFamily::u_stat, {WeightKind::pi0_inverse, 0.0}},
        {StatFamily::u_stat, {WeightKind::identity, 0.0}},
        {StatFamily::u_stat, {WeightKind::mixture, 0.5}},
    };
    std::vector<TheoryComparisonRow> rows;
    for (int d : d_grid) {
        ProbVector pi0 = power_law(d, 1.0);
        ProbVector pi = power_law(d, r);
        PowerStudyConfig config{
            .null_pi = pi0,
            .null_label = "powerlaw:" + std::to_string(d) + ":1",
            .alternatives = {Alternative{"powerlaw:" + std::to_string(d) + ":" +
                                             std::to_string(r),
                                         pi, r}},
            .n = n,
            .reps = reps,
            .alpha = alpha,
            .statistics = kinds,
            .calibration = Calibration::monte_carlo,
            // Decorrelate the per-dimension studies.
            .seed = seed + static_cast<std::uint64_t>(d),
            .threads = threads,
        };
        PowerStudyReport report = run_power_study(config);
        for (const auto& cell : report.cells) {
            StatisticSpec spec = parse_statistic_spec(cell.statistic);
            WeightVector w = make_weight(spec.weight, pi0);
            TheoryComparisonRow row;
            row.d = d;
            row.statistic = cell.statistic;
            row.empirical = cell.empirical_power;
            row.theoretical = gaussian_power(pi0, pi, w, n, alpha, PowerForm::full);
            row.null_quantile = cell.null_quantile;
            row.standard_error = cell.standard_error;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

FidelityResult fidelity_check(const ProbVector& pi0, std::int64_t n, int reps,
                              FidelityTarget target, std::uint64_t seed, int threads) {
    if (reps < 1000) {
        fail("insufficient_replicates", "fidelity_check needs at least 1000 replicates");
    }
    if (n < 2) fail("insufficient_sample", "fidelity_check needs n >= 2");

    FidelityResult result;
    result.target = target;
    result.n = n;
    result.d = pi0.dim();
    result.reps = reps;
    result.seed = seed;

    if (target == FidelityTarget::poisson) {
        std::vector<PreparedStatistic> stats = {
            prepare_statistic({StatFamily::collision, {}}, pi0)};
        auto sims = simulate_statistics(pi0, pi0, stats, n, reps, seed, 0, threads);
        PoissonReference ref = poisson_reference(pi0, pi0, n);
        result.eta0 = ref.eta0;

        std::int64_t max_w = 0;
        for (double v : sims[0]) max_w = std::max(max_w, static_cast<std::int64_t>(v));
        std::vector<double> empirical(static_cast<std::size_t>(max_w) + 1, 0.0);
        for (double v : sims[0]) empirical[static_cast<std::size_t>(v)] += 1.0 / reps;

        // TV over 0..max with the Poisson mass beyond max folded into one cell.
        double tv = 0.0;
        for (std::int64_t k = 0; k <= max_w; ++k) {
            tv += std::fabs(empirical[static_cast<std::size_t>(k)] -
                            poisson_pmf(k, ref.eta0));
        }
        tv += poisson_tail_gt(max_w, ref.eta0);
        result.distance = 0.5 * tv;
    } else {
        std::vector<PreparedStatistic> stats = {
            prepare_statistic({StatFamily::u_stat, {WeightKind::identity, 0.0}}, pi0)};
        auto sims = simulate_statistics(pi0, pi0, stats, n, reps, seed, 0, threads);
        std::vector<double> a(static_cast<std::size_t>(pi0.dim()), 1.0);
        double trace0 = trace_weighted_sq(pi0, a);
        if (!(trace0 > 0.0)) fail("zero_variance", "fidelity_check: degenerate null");
        result.null_trace = trace0;

        double scale = std::sqrt(binom2(n)) / std::sqrt(trace0);
        std::vector<double>& z = sims[0];
        for (double& v : z) v *= scale;
        std::sort(z.begin(), z.end());
        double ks = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            double cdf = normal_cdf(z[i]);
            double hi = static_cast<double>(i + 1) / reps - cdf;
            double lo = cdf - static_cast<double>(i) / reps;
            ks = std::max(ks, std::max(hi, lo));
        }
        result.distance = ks;
    }
    return result;
}

TestResult empirical_quantile_calibrated_test(const CountVector& counts, const ProbVector& pi0,
                                              const StatisticSpec& kind, double alpha, int reps,
                                              std::uint64_t seed, int threads) {
    require_same_dim(counts.dim(), pi0.dim(), "empirical_quantile_calibrated_test");
    if (reps < 100) {
        fail("insufficient_replicates",
             "empirical_quantile_calibrated_test needs at least 100 replicates");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) fail("domain", "alpha must lie in (0, 1)");

    PreparedStatistic stat = prepare_statistic(kind, pi0);
    double observed = evaluate_prepared(stat, counts, pi0);
    auto sims = simulate_statistics(pi0, pi0, {stat}, counts.n(), reps, seed, 0, threads);

    std::int64_t at_least = 0;
    for (double v : sims[0]) {
        if (v >= observed) ++at_least;
    }
    double critical = null_quantile(std::move(sims[0]), alpha);

    TestResult result;
    result.statistic = observed;
    result.calibration = Calibration::monte_carlo;
    result.critical_value = critical;
    result.p_value = (1.0 + static_cast<double>(at_least)) / (reps + 1.0);
    result.reject = observed > critical;
    result.alpha = alpha;
    result.n = counts.n();
    result.d = counts.dim();
    result.weight_provenance =
        kind.family == StatFamily::u_stat
            ? to_string(kind.weight)
            : (kind.family == StatFamily::collision ? "identity" : "pi0");
    return result;
}

}  // namespace mgof
