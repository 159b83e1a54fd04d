#include "multigof/types.hpp"

#include <cmath>
#include <cstdio>

#include "multigof/numeric.hpp"

namespace mgof {

namespace {

std::string format_param(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) fail("invalid_dimension", "probability vector needs at least one bin");
    KahanSum sum;
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) {
            fail("domain", "probability entries must be finite and non-negative");
        }
        sum.add(v);
    }
    double total = sum.value();
    if (total <= 0.0) fail("domain", "probability entries must not all be zero");
    for (double& v : values_) v /= total;
    KahanSum check;
    for (double v : values_) check.add(v);
    if (std::fabs(check.value() - 1.0) > 1e-12) {
        fail("domain", "probability vector failed to normalize within 1e-12");
    }
}

ProbVector ProbVector::uniform(int d) {
    if (d < 1) fail("invalid_dimension", "dimension must be positive");
    return ProbVector(std::vector<double>(static_cast<std::size_t>(d), 1.0 / d));
}

std::string to_string(const WeightProvenance& prov) {
    switch (prov.kind) {
        case WeightKind::identity: return "identity";
        case WeightKind::pi0_inverse: return "pi0";
        case WeightKind::mixture: return "mixture:" + format_param(prov.param);
        case WeightKind::truncated: return "trunc";
        case WeightKind::lp: return "lp:" + format_param(prov.param);
        case WeightKind::custom: return "custom";
    }
    return "custom";
}

WeightVector::WeightVector(std::vector<double> w, WeightProvenance prov)
    : w_(std::move(w)), prov_(prov) {
    if (w_.empty()) fail("invalid_dimension", "weight vector needs at least one bin");
    for (double v : w_) {
        if (!std::isfinite(v) || v <= 0.0) {
            fail("domain", "weights must be finite and strictly positive");
        }
    }
}

WeightVector WeightVector::identity(int d) {
    if (d < 1) fail("invalid_dimension", "dimension must be positive");
    return WeightVector(std::vector<double>(static_cast<std::size_t>(d), 1.0),
                        {WeightKind::identity, 0.0});
}

WeightVector WeightVector::pi0_inverse(const ProbVector& pi0) {
    for (double v : pi0.values()) {
        if (v <= 0.0) {
            fail("zero_null_entry",
                 "pi0-inverse weights require every null entry to be positive");
        }
    }
    return WeightVector(pi0.values(), {WeightKind::pi0_inverse, 0.0});
}

std::vector<double> WeightVector::inverse() const {
    std::vector<double> a(w_.size());
    for (std::size_t j = 0; j < w_.size(); ++j) a[j] = 1.0 / w_[j];
    return a;
}

CountVector::CountVector(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) fail("invalid_dimension", "count vector needs at least one bin");
    n_ = 0;
    for (std::int64_t c : counts_) {
        if (c < 0) fail("domain", "counts must be non-negative");
        n_ += c;
    }
    if (n_ < 1) fail("domain", "count vector must contain at least one observation");
}

SampleList::SampleList(int d, std::vector<std::int32_t> bins)
    : d_(d), bins_(std::move(bins)) {
    if (d_ < 1) fail("invalid_dimension", "dimension must be positive");
    if (bins_.empty()) fail("domain", "sample list must contain at least one observation");
    for (std::int32_t b : bins_) {
        if (b < 0 || b >= d_) fail("domain", "sample bin index out of range");
    }
}

SampleList SampleList::from_counts(const CountVector& counts) {
    std::vector<std::int32_t> bins;
    bins.reserve(static_cast<std::size_t>(counts.n()));
    for (int j = 0; j < counts.dim(); ++j) {
        for (std::int64_t k = 0; k < counts[j]; ++k) bins.push_back(j);
    }
    return SampleList(counts.dim(), std::move(bins));
}

CountVector SampleList::to_counts() const {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(d_), 0);
    for (std::int32_t b : bins_) ++counts[static_cast<std::size_t>(b)];
    return CountVector(std::move(counts));
}

}  // namespace mgof
