#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "multigof/error.hpp"

namespace mgof {

/// A point on the d-simplex. Constructors renormalize non-negative input and
/// then require the entries to sum to 1 within 1e-12. Immutable once built.
class ProbVector {
public:
    explicit ProbVector(std::vector<double> values);
    static ProbVector uniform(int d);

    int dim() const { return static_cast<int>(values_.size()); }
    double operator[](int j) const { return values_[static_cast<std::size_t>(j)]; }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const ProbVector& other) const { return values_ == other.values_; }

private:
    std::vector<double> values_;
};

enum class WeightKind { identity, pi0_inverse, mixture, truncated, lp, custom };

/// How a weight vector was built; param carries gamma for mixture weights and
/// p for lp weights (infinity allowed).
struct WeightProvenance {
    WeightKind kind = WeightKind::custom;
    double param = 0.0;
};

std::string to_string(const WeightProvenance& prov);

/// Strictly positive per-bin weights w. The diagonal test matrix is
/// A = diag(1/w); identity provenance means w_j = 1 and pi0_inverse means
/// w_j = pi0_j.
class WeightVector {
public:
    WeightVector(std::vector<double> w, WeightProvenance prov);
    static WeightVector identity(int d);
    static WeightVector pi0_inverse(const ProbVector& pi0);

    int dim() const { return static_cast<int>(w_.size()); }
    double operator[](int j) const { return w_[static_cast<std::size_t>(j)]; }
    const std::vector<double>& values() const { return w_; }
    const WeightProvenance& provenance() const { return prov_; }

    /// Diagonal of A, a_j = 1/w_j.
    std::vector<double> inverse() const;

private:
    std::vector<double> w_;
    WeightProvenance prov_;
};

/// Observed bin counts Y with n = sum Y_j. Requires n >= 1.
class CountVector {
public:
    explicit CountVector(std::vector<std::int64_t> counts);

    int dim() const { return static_cast<int>(counts_.size()); }
    std::int64_t n() const { return n_; }
    std::int64_t operator[](int j) const { return counts_[static_cast<std::size_t>(j)]; }
    const std::vector<std::int64_t>& counts() const { return counts_; }

private:
    std::vector<std::int64_t> counts_;
    std::int64_t n_ = 0;
};

/// The bin index of each one-hot observation. Bins are stored 0-based; CSV
/// input/output is 1-based per the file formats.
class SampleList {
public:
    SampleList(int d, std::vector<std::int32_t> bins);
    static SampleList from_counts(const CountVector& counts);

    CountVector to_counts() const;
    int dim() const { return d_; }
    std::int64_t size() const { return static_cast<std::int64_t>(bins_.size()); }
    const std::vector<std::int32_t>& bins() const { return bins_; }

private:
    int d_ = 0;
    std::vector<std::int32_t> bins_;
};

inline void require_same_dim(int a, int b, const char* what) {
    if (a != b) {
        fail("dimension_mismatch",
             std::string(what) + ": dimensions differ (" + std::to_string(a) + " vs " +
                 std::to_string(b) + ")");
    }
}

}  // namespace mgof
