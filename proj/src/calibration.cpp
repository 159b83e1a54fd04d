#include "multigof/calibration.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "multigof/numeric.hpp"
#include "multigof/special.hpp"

namespace mgof {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) fail("domain", "alpha must lie in (0, 1)");
}

double dot_compensated(const std::vector<double>& a, const std::vector<double>& b) {
    KahanSum s;
    for (std::size_t j = 0; j < a.size(); ++j) s.add(a[j] * b[j]);
    return s.value();
}

}  // namespace

std::string to_string(Calibration c) {
    switch (c) {
        case Calibration::poisson: return "poisson";
        case Calibration::gaussian: return "gaussian";
        case Calibration::chebyshev: return "chebyshev";
        case Calibration::monte_carlo: return "monte_carlo";
    }
    return "monte_carlo";
}

Calibration parse_calibration(const std::string& text) {
    if (text == "poisson") return Calibration::poisson;
    if (text == "gaussian") return Calibration::gaussian;
    if (text == "chebyshev") return Calibration::chebyshev;
    if (text == "monte_carlo") return Calibration::monte_carlo;
    fail("parse", "unknown calibration '" + text +
                      "' (expected poisson | gaussian | chebyshev | monte_carlo)");
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::poisson: return "poisson";
        case Regime::gaussian_null: return "gaussian_null";
        case Regime::gaussian_strong_signal: return "gaussian_strong_signal";
        case Regime::gaussian_weak_signal: return "gaussian_weak_signal";
    }
    return "gaussian_null";
}

PoissonReference poisson_reference(const ProbVector& pi, const ProbVector& pi0,
                                   std::int64_t n) {
    require_same_dim(pi.dim(), pi0.dim(), "poisson_reference");
    if (n < 2) fail("insufficient_sample", "poisson_reference needs n >= 2");
    double b = binom2(n);
    PoissonReference ref;
    ref.eta1 = b * dot_compensated(pi.values(), pi.values());
    ref.eta0 = b * dot_compensated(pi0.values(), pi0.values());
    ref.eta2 = b * dot_compensated(pi.values(), pi0.values());
    return ref;
}

std::int64_t poisson_critical_value(double eta0, double alpha) {
    if (!(eta0 > 0.0)) fail("domain", "poisson_critical_value needs eta0 > 0");
    require_alpha(alpha);
    std::int64_t c = 0;
    while (poisson_tail_gt(c, eta0) > alpha) ++c;
    return c;
}

TestResult poisson_test(const CountVector& counts, const ProbVector& pi0, double alpha) {
    require_same_dim(counts.dim(), pi0.dim(), "poisson_test");
    if (counts.n() < 2) fail("insufficient_sample", "poisson_test needs n >= 2");
    require_alpha(alpha);
    PoissonReference ref = poisson_reference(pi0, pi0, counts.n());
    std::int64_t w = collision_statistic(counts);
    std::int64_t c = poisson_critical_value(ref.eta0, alpha);
    TestResult result;
    result.statistic = static_cast<double>(w);
    result.calibration = Calibration::poisson;
    result.critical_value = static_cast<double>(c);
    result.p_value = poisson_tail_gt(w - 1, ref.eta0);  // P(Pois >= W)
    result.reject = w > c;
    result.alpha = alpha;
    result.n = counts.n();
    result.d = counts.dim();
    result.weight_provenance = "identity";
    return result;
}

double poisson_power(double eta1, std::int64_t c_alpha) {
    if (!(eta1 > 0.0)) fail("domain", "poisson_power needs eta1 > 0");
    if (c_alpha < 0) fail("domain", "poisson_power needs a non-negative critical value");
    return poisson_tail_gt(c_alpha, eta1);
}

double tv_bound(const ProbVector& pi, std::int64_t n) {
    if (n < 2) fail("insufficient_sample", "tv_bound needs n >= 2");
    KahanSum cubes;
    KahanSum squares;
    for (double v : pi.values()) {
        cubes.add(v * v * v);
        squares.add(v * v);
    }
    double eta = binom2(n) * squares.value();
    if (!(eta > 0.0)) fail("domain", "tv_bound needs binom(n,2) pi^T pi > 0");
    double n3 = static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(n);
    double sq = squares.value();
    return 2.0 * n3 * ((1.0 - std::exp(-eta)) / eta) * (cubes.value() + sq * sq);
}

TestResult gaussian_test(const CountVector& counts, const ProbVector& pi0,
                         const WeightVector& w, double alpha) {
    require_same_dim(counts.dim(), pi0.dim(), "gaussian_test");
    require_same_dim(counts.dim(), w.dim(), "gaussian_test");
    if (counts.n() < 2) fail("insufficient_sample", "gaussian_test needs n >= 2");
    require_alpha(alpha);
    std::vector<double> a = w.inverse();
    double trace0 = trace_weighted_sq(pi0, a);
    if (!(trace0 > 0.0)) {
        fail("zero_variance", "gaussian_test: tr{(A Sigma0)^2} is zero (degenerate null)");
    }
    double u = u_statistic(counts, pi0, w);
    double statistic = std::sqrt(binom2(counts.n())) * u / std::sqrt(trace0);
    double z = normal_upper_quantile(alpha);
    TestResult result;
    result.statistic = statistic;
    result.calibration = Calibration::gaussian;
    result.critical_value = z;
    result.p_value = 1.0 - normal_cdf(statistic);
    result.reject = statistic > z;
    result.alpha = alpha;
    result.n = counts.n();
    result.d = counts.dim();
    result.weight_provenance = to_string(w.provenance());
    return result;
}

double gaussian_power(const ProbVector& pi0, const ProbVector& pi, const WeightVector& w,
                      std::int64_t n, double alpha, PowerForm form) {
    require_same_dim(pi0.dim(), pi.dim(), "gaussian_power");
    require_same_dim(pi0.dim(), w.dim(), "gaussian_power");
    if (n < 2) fail("insufficient_sample", "gaussian_power needs n >= 2");
    require_alpha(alpha);
    std::vector<double> a = w.inverse();
    double signal = expectation_u(pi, pi0, w);  // ||A^{1/2}(pi - pi0)||^2
    double quad = signal_quadform(pi, pi0, w);
    switch (form) {
        case PowerForm::full: {
            double lambda0 = trace_weighted_sq(pi0, a);
            double lambda1 = trace_weighted_sq(pi, a);
            double lambda2 = 2.0 * static_cast<double>(n - 1) * quad;
            double noise = lambda1 + lambda2;
            if (!(noise > 0.0)) fail("zero_variance", "gaussian_power: zero variance under pi");
            double z = normal_upper_quantile(alpha);
            return normal_cdf(-std::sqrt(lambda0 / noise) * z +
                              std::sqrt(binom2(n)) * signal / std::sqrt(noise));
        }
        case PowerForm::strong_signal: {
            if (!(quad > 0.0)) {
                fail("domain", "strong-signal power needs a nonzero signal quadratic form");
            }
            return normal_cdf(std::sqrt(static_cast<double>(n)) * signal /
                              std::sqrt(4.0 * quad));
        }
        case PowerForm::weak_signal: {
            double lambda0 = trace_weighted_sq(pi0, a);
            double lambda1 = trace_weighted_sq(pi, a);
            if (!(lambda1 > 0.0)) fail("zero_variance", "gaussian_power: zero variance under pi");
            double z = normal_upper_quantile(alpha);
            return normal_cdf(-std::sqrt(lambda0 / lambda1) * z +
                              static_cast<double>(n) * signal / std::sqrt(2.0 * lambda1));
        }
    }
    fail("domain", "unknown power form");
}

TestResult minimax_test(const CountVector& counts, const ProbVector& pi0,
                        const WeightVector& w, double alpha) {
    require_same_dim(counts.dim(), pi0.dim(), "minimax_test");
    require_same_dim(counts.dim(), w.dim(), "minimax_test");
    if (counts.n() < 2) fail("insufficient_sample", "minimax_test needs n >= 2");
    require_alpha(alpha);
    std::vector<double> a = w.inverse();
    double trace0 = trace_weighted_sq(pi0, a);
    double t_alpha = std::sqrt(trace0 / (alpha * binom2(counts.n())));
    double u = u_statistic(counts, pi0, w);
    TestResult result;
    result.statistic = u;
    result.calibration = Calibration::chebyshev;
    result.critical_value = t_alpha;
    result.p_value = std::nullopt;
    result.reject = u > t_alpha;
    result.alpha = alpha;
    result.n = counts.n();
    result.d = counts.dim();
    result.weight_provenance = to_string(w.provenance());
    return result;
}

SeparationPlan separation_planner(std::int64_t d, std::int64_t n, double alpha, double zeta,
                                  double C) {
    if (d < 1 || n < 1) fail("invalid_dimension", "separation_planner needs positive d and n");
    require_alpha(alpha);
    if (!(zeta > 0.0 && zeta <= 1.0)) fail("domain", "zeta must lie in (0, 1]");
    if (!(C > 0.0)) fail("domain", "C must be positive");
    SeparationPlan plan;
    plan.eps_sq_required = C * std::sqrt(static_cast<double>(d)) / static_cast<double>(n) *
                           (1.0 / std::sqrt(alpha) + 1.0 / zeta);
    plan.minimax_rate = std::pow(static_cast<double>(d), 0.25) / std::sqrt(static_cast<double>(n));
    return plan;
}

KernelMoments kernel_moments(const ProbVector& pi, const ProbVector& pi0,
                             std::span<const double> a) {
    require_same_dim(pi.dim(), pi0.dim(), "kernel_moments");
    require_same_dim(pi.dim(), static_cast<int>(a.size()), "kernel_moments");
    int d = pi.dim();
    KahanSum base;
    for (int l = 0; l < d; ++l) base.add(a[static_cast<std::size_t>(l)] * pi0[l] * pi0[l]);
    double s0 = base.value();

    std::vector<double> centered(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        centered[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)] * pi0[j];
    }

    KahanSum e4;
    KahanSum e22;
    for (int j = 0; j < d; ++j) {
        double cj = centered[static_cast<std::size_t>(j)];
        KahanSum m2;
        KahanSum m4;
        for (int k = 0; k < d; ++k) {
            double h = (j == k ? a[static_cast<std::size_t>(j)] : 0.0) - cj -
                       centered[static_cast<std::size_t>(k)] + s0;
            double h2 = h * h;
            m2.add(pi[k] * h2);
            m4.add(pi[k] * h2 * h2);
        }
        e4.add(pi[j] * m4.value());
        e22.add(pi[j] * m2.value() * m2.value());
    }
    return {e4.value(), e22.value()};
}

RegimeDiagnostics regime_diagnostics(const ProbVector& pi, const ProbVector& pi0,
                                     const WeightVector& w, std::int64_t n, double sigma,
                                     const RegimeThresholds& thresholds) {
    require_same_dim(pi.dim(), pi0.dim(), "regime_diagnostics");
    require_same_dim(pi.dim(), w.dim(), "regime_diagnostics");
    if (n < 2) fail("insufficient_sample", "regime_diagnostics needs n >= 2");
    int d = pi.dim();
    double nn = static_cast<double>(n);
    double n3 = nn * nn * nn;

    RegimeDiagnostics diag;
    diag.p2 = poisson_reference(pi, pi0, n);

    KahanSum cubes;
    KahanSum squares;
    KahanSum cross_sq;  // sum pi_j pi0_j^2
    KahanSum cross;     // sum pi_j pi0_j
    for (int j = 0; j < d; ++j) {
        double pj = pi[j];
        double qj = pi0[j];
        cubes.add(pj * pj * pj);
        squares.add(pj * pj);
        cross_sq.add(pj * qj * qj);
        cross.add(pj * qj);
    }
    double sq = squares.value();
    diag.p1 = n3 * (cubes.value() + sq * sq);
    diag.p3 = n3 * (cross_sq.value() - cross.value() * cross.value());

    std::vector<double> a = w.inverse();
    double trace2 = trace_weighted_sq(pi, a);
    if (!(trace2 > 0.0)) {
        fail("zero_variance", "regime_diagnostics: tr{(A Sigma)^2} is zero (degenerate pi)");
    }

    if (d <= kDenseTraceCap) {
        // M = A Sigma = diag(u) - u pi^T with u_j = a_j pi_j; one dense
        // multiply gives tr(M^4) = sum_{ij} (M^2)_{ij} (M^2)_{ji}.
        Eigen::VectorXd u(d);
        Eigen::VectorXd pvec(d);
        for (int j = 0; j < d; ++j) {
            u(j) = a[static_cast<std::size_t>(j)] * pi[j];
            pvec(j) = pi[j];
        }
        Eigen::MatrixXd m = -u * pvec.transpose();
        m.diagonal() += u;
        Eigen::MatrixXd m2 = m * m;
        double tr4 = m2.cwiseProduct(m2.transpose()).sum();
        diag.trace_ratio = tr4 / (trace2 * trace2);
    } else {
        diag.trace_ratio_note = "dense tr{(A Sigma)^4} path refused for d > " +
                                std::to_string(kDenseTraceCap);
    }

    KernelMoments moments = kernel_moments(pi, pi0, a);
    diag.moment_ratio =
        (moments.h4 + nn * moments.h2h2) / (nn * nn * trace2 * trace2);

    double quad = signal_quadform(pi, pi0, w);
    diag.snr = nn * quad / trace2;

    std::vector<double> shifted(a);
    for (double& v : shifted) v -= sigma;
    diag.scalar_weight_gap = nn * nn * trace_weighted_sq(pi, shifted);

    bool null_case = pi.values() == pi0.values();
    if (diag.p1 <= thresholds.p1_max && diag.p2.eta0 <= thresholds.eta0_max) {
        diag.suggested_regime = Regime::poisson;
    } else if (null_case) {
        diag.suggested_regime = Regime::gaussian_null;
    } else if (diag.snr >= thresholds.snr_cut) {
        diag.suggested_regime = Regime::gaussian_strong_signal;
    } else {
        diag.suggested_regime = Regime::gaussian_weak_signal;
    }
    if (diag.p1 > 0.5 * thresholds.p1_max && diag.p1 <= 2.0 * thresholds.p1_max) {
        diag.regime_note = "p1 within a factor of 2 of the Poisson threshold";
    }
    return diag;
}

}  // namespace mgof
