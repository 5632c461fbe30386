#pragma once

#include <cstdint>

namespace riskdyn {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based SplitMix64 generator. The n-th output is
/// mix64(seed + (n+1) * 0x9E3779B97F4A7C15), so streams are reproducible
/// across platforms and implementations from the seed alone.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

/// Stream-derivation rule used everywhere a master seed fans out into
/// independent substreams (one per replica, per perturbation set, ...):
///
///   stream_seed(master, index) = mix64(master ^ mix64(index + 0x9E3779B97F4A7C15))
///
/// The rule is part of the reproducibility contract: identical
/// (master_seed, index) pairs give bit-identical streams regardless of how
/// work is scheduled across threads.
inline SplitMix64 substream(std::uint64_t master_seed, std::uint64_t index) {
    return SplitMix64(mix64(master_seed ^ mix64(index + 0x9E3779B97F4A7C15ULL)));
}

} // namespace riskdyn
