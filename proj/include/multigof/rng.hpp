#pragma once

#include <cstdint>
#include <random>

namespace mgof {

/// SplitMix64 finalizer, used as the documented substream mixing function.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic random stream: a mt19937_64 engine whose seed is derived by
/// SplitMix64 mixing, so nearby master seeds give unrelated streams.
///
/// Substream contract: replicate r of scenario s under master seed m draws
/// from RngStream::substream(m, s, r) = mix64(mix64(m + K1*(s+1)) + K2*(r+1)).
/// Every consumer owns its stream exclusively; simulations derive one stream
/// per replicate, which makes results independent of execution schedule.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

    static RngStream substream(std::uint64_t master_seed, std::uint64_t scenario,
                               std::uint64_t replicate) {
        constexpr std::uint64_t k1 = 0x9E3779B97F4A7C15ULL;
        constexpr std::uint64_t k2 = 0xC2B2AE3D27D4EB4FULL;
        std::uint64_t key = mix64(master_seed + k1 * (scenario + 1));
        key = mix64(key + k2 * (replicate + 1));
        return RngStream(key);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Exact Binomial(trials, p) draw by two-sided chop-down from the mode.
    /// Expected cost O(1 + sqrt(trials * p * (1-p))); no underflow for large
    /// trials since the walk starts at the modal pmf.
    std::int64_t binomial(std::int64_t trials, double p);

private:
    std::mt19937_64 engine_;
};

}  // namespace mgof
