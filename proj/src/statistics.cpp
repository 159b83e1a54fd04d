#include "multigof/statistics.hpp"

#include <cmath>
#include <limits>

#include "multigof/distributions.hpp"
#include "multigof/numeric.hpp"

namespace mgof {

namespace {

void require_positive_null(const ProbVector& pi0) {
    for (double v : pi0.values()) {
        if (v <= 0.0) {
            fail("zero_null_entry", "statistic divides by pi0; every entry must be positive");
        }
    }
}

}  // namespace

double pearson_chi2(const CountVector& counts, const ProbVector& pi0) {
    require_same_dim(counts.dim(), pi0.dim(), "pearson_chi2");
    require_positive_null(pi0);
    double n = static_cast<double>(counts.n());
    KahanSum sum;
    for (int j = 0; j < counts.dim(); ++j) {
        double expected = n * pi0[j];
        double diff = static_cast<double>(counts[j]) - expected;
        sum.add(diff * diff / expected);
    }
    return sum.value();
}

double u_statistic(const CountVector& counts, const ProbVector& pi0, const WeightVector& w) {
    require_same_dim(counts.dim(), pi0.dim(), "u_statistic");
    require_same_dim(counts.dim(), w.dim(), "u_statistic");
    std::int64_t n = counts.n();
    if (n < 2) fail("insufficient_sample", "u_statistic needs at least two observations");
    double nn = static_cast<double>(n);
    KahanSum quad;   // sum_j (Y_j - n pi0_j)^2 / w_j
    KahanSum diag;   // sum_j Y_j (1 - 2 pi0_j) / w_j
    KahanSum null2;  // sum_j pi0_j^2 / w_j
    for (int j = 0; j < counts.dim(); ++j) {
        double y = static_cast<double>(counts[j]);
        double p0 = pi0[j];
        double wj = w[j];
        double diff = y - nn * p0;
        quad.add(diff * diff / wj);
        diag.add(y * (1.0 - 2.0 * p0) / wj);
        null2.add(p0 * p0 / wj);
    }
    double pair_sum = 0.5 * (quad.value() - diag.value() - nn * null2.value());
    return pair_sum / binom2(n);
}

double u_statistic_pairwise(const SampleList& samples, const ProbVector& pi0,
                            const WeightVector& w) {
    require_same_dim(samples.dim(), pi0.dim(), "u_statistic_pairwise");
    require_same_dim(samples.dim(), w.dim(), "u_statistic_pairwise");
    std::int64_t n = samples.size();
    if (n < 2) fail("insufficient_sample", "u_statistic_pairwise needs at least two observations");

    std::vector<double> a = w.inverse();
    KahanSum base;  // sum_l a_l pi0_l^2
    for (int l = 0; l < pi0.dim(); ++l) base.add(a[static_cast<std::size_t>(l)] * pi0[l] * pi0[l]);
    double s0 = base.value();

    const auto& bins = samples.bins();
    KahanSum sum;
    for (std::int64_t i = 0; i < n; ++i) {
        std::int32_t bi = bins[static_cast<std::size_t>(i)];
        double ci = a[static_cast<std::size_t>(bi)] * pi0[bi];
        for (std::int64_t j = i + 1; j < n; ++j) {
            std::int32_t bj = bins[static_cast<std::size_t>(j)];
            double h = (bi == bj ? a[static_cast<std::size_t>(bi)] : 0.0) - ci -
                       a[static_cast<std::size_t>(bj)] * pi0[bj] + s0;
            sum.add(h);
        }
    }
    return sum.value() / binom2(n);
}

double zelterman_phi(const CountVector& counts, const ProbVector& pi0) {
    require_same_dim(counts.dim(), pi0.dim(), "zelterman_phi");
    require_positive_null(pi0);
    double n = static_cast<double>(counts.n());
    KahanSum correction;
    for (int j = 0; j < counts.dim(); ++j) {
        correction.add(static_cast<double>(counts[j]) / (n * pi0[j]));
    }
    return pearson_chi2(counts, pi0) - correction.value();
}

std::int64_t collision_statistic(const CountVector& counts) {
    std::int64_t w = 0;
    for (int j = 0; j < counts.dim(); ++j) {
        std::int64_t y = counts[j];
        w += y * (y - 1) / 2;
    }
    return w;
}

double trace_weighted_sq(const ProbVector& pi, std::span<const double> a) {
    require_same_dim(pi.dim(), static_cast<int>(a.size()), "trace_weighted_sq");
    KahanSum sq;     // sum a_j^2 pi_j^2
    KahanSum cube;   // sum a_j^2 pi_j^3
    KahanSum cross;  // sum a_j pi_j^2
    for (int j = 0; j < pi.dim(); ++j) {
        double aj = a[static_cast<std::size_t>(j)];
        double pj = pi[j];
        sq.add(aj * aj * pj * pj);
        cube.add(aj * aj * pj * pj * pj);
        cross.add(aj * pj * pj);
    }
    return sq.value() - 2.0 * cube.value() + cross.value() * cross.value();
}

double signal_quadform(const ProbVector& pi, const ProbVector& pi0, const WeightVector& w) {
    require_same_dim(pi.dim(), pi0.dim(), "signal_quadform");
    require_same_dim(pi.dim(), w.dim(), "signal_quadform");
    KahanSum quad;  // sum d_j^2 pi_j / w_j^2
    KahanSum lin;   // sum d_j pi_j / w_j
    for (int j = 0; j < pi.dim(); ++j) {
        double delta = pi[j] - pi0[j];
        double wj = w[j];
        quad.add(delta * delta * pi[j] / (wj * wj));
        lin.add(delta * pi[j] / wj);
    }
    return quad.value() - lin.value() * lin.value();
}

double variance_u(const ProbVector& pi, const ProbVector& pi0, const WeightVector& w,
                  std::int64_t n) {
    if (n < 2) fail("insufficient_sample", "variance_u needs n >= 2");
    std::vector<double> a = w.inverse();
    double trace = trace_weighted_sq(pi, a);
    double signal = signal_quadform(pi, pi0, w);
    return (trace + 2.0 * static_cast<double>(n - 1) * signal) / binom2(n);
}

double expectation_u(const ProbVector& pi, const ProbVector& pi0, const WeightVector& w) {
    require_same_dim(pi.dim(), pi0.dim(), "expectation_u");
    require_same_dim(pi.dim(), w.dim(), "expectation_u");
    KahanSum sum;
    for (int j = 0; j < pi.dim(); ++j) {
        double delta = pi[j] - pi0[j];
        sum.add(delta * delta / w[j]);
    }
    return sum.value();
}

std::string to_string(const StatisticSpec& spec) {
    switch (spec.family) {
        case StatFamily::pearson: return "pearson";
        case StatFamily::zelterman: return "zelterman";
        case StatFamily::collision: return "collision";
        case StatFamily::u_stat: return "u:" + to_string(spec.weight);
    }
    return "u:" + to_string(spec.weight);
}

WeightProvenance parse_weight_spec(const std::string& text) {
    if (text == "identity") return {WeightKind::identity, 0.0};
    if (text == "pi0") return {WeightKind::pi0_inverse, 0.0};
    if (text == "trunc") return {WeightKind::truncated, 0.0};
    if (text.rfind("mixture:", 0) == 0) {
        std::size_t pos = 0;
        std::string arg = text.substr(8);
        double gamma = std::stod(arg, &pos);
        if (pos != arg.size()) fail("parse", "bad mixture gamma in weight spec '" + text + "'");
        if (!(gamma > 0.0 && gamma < 1.0)) fail("domain", "mixture gamma must lie in (0, 1)");
        return {WeightKind::mixture, gamma};
    }
    if (text.rfind("lp:", 0) == 0) {
        std::string arg = text.substr(3);
        double p;
        if (arg == "inf") {
            p = std::numeric_limits<double>::infinity();
        } else {
            std::size_t pos = 0;
            p = std::stod(arg, &pos);
            if (pos != arg.size()) fail("parse", "bad lp exponent in weight spec '" + text + "'");
        }
        if (std::isnan(p) || p < 1.0) fail("domain", "lp weight needs p >= 1");
        return {WeightKind::lp, p};
    }
    fail("parse", "unknown weight spec '" + text +
                      "' (expected identity | pi0 | mixture:<g> | trunc | lp:<p>)");
}

StatisticSpec parse_statistic_spec(const std::string& text) {
    if (text == "pearson") return {StatFamily::pearson, {}};
    if (text == "zelterman") return {StatFamily::zelterman, {}};
    if (text == "collision") return {StatFamily::collision, {}};
    if (text.rfind("u:", 0) == 0) {
        return {StatFamily::u_stat, parse_weight_spec(text.substr(2))};
    }
    fail("parse", "unknown statistic spec '" + text +
                      "' (expected pearson | zelterman | collision | u:<weight>)");
}

WeightVector make_weight(const WeightProvenance& prov, const ProbVector& pi0) {
    switch (prov.kind) {
        case WeightKind::identity: return WeightVector::identity(pi0.dim());
        case WeightKind::pi0_inverse: return WeightVector::pi0_inverse(pi0);
        case WeightKind::mixture: return mixture_weight(pi0, prov.param);
        case WeightKind::truncated: return truncated_weight(pi0);
        case WeightKind::lp: return lp_mixture_weight(pi0, prov.param);
        case WeightKind::custom: break;
    }
    fail("domain", "custom weights cannot be materialized from a provenance tag");
}

StatisticValue evaluate_statistic(const StatisticSpec& spec, const CountVector& counts,
                                  const ProbVector& pi0) {
    StatisticValue out;
    out.kind = spec;
    out.n = counts.n();
    out.d = counts.dim();
    switch (spec.family) {
        case StatFamily::pearson: out.value = pearson_chi2(counts, pi0); break;
        case StatFamily::zelterman: out.value = zelterman_phi(counts, pi0); break;
        case StatFamily::collision:
            out.value = static_cast<double>(collision_statistic(counts));
            break;
        case StatFamily::u_stat:
            out.value = u_statistic(counts, pi0, make_weight(spec.weight, pi0));
            break;
    }
    return out;
}

}  // namespace mgof
