#pragma once

#include <cstdint>
#include <span>

namespace srforge {

/// Portable pseudo-random stream: xoshiro256** seeded through SplitMix64.
///
/// Every draw is defined in terms of 64-bit integer arithmetic plus a few
/// libm calls, so a given seed produces the same stream on every platform
/// with an IEEE-754 libm. Distribution helpers never use <random>
/// distributions, whose output is implementation-defined.
///
/// Child streams for per-item work are derived with `derive_seed`:
///   derive_seed(seed, index) = mix64(seed ^ mix64(index + 0x9E3779B97F4A7C15))
/// where mix64 is the SplitMix64 finalizer.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed);

    /// Stream for item `index` of a job seeded with `seed`.
    static SeededRng for_item(std::uint64_t seed, std::uint64_t index) {
        return SeededRng(derive_seed(seed, index));
    }

    static std::uint64_t mix64(std::uint64_t z);
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [lo, hi].
    int uniform_int(int lo, int hi);
    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (cosine branch only; no cached state).
    double normal();
    /// Fills `out` with std_dev * N(0, 1), using both Box-Muller outputs.
    void fill_normal(std::span<float> out, double std_dev);
    void fill_normal(std::span<double> out, double std_dev);
    /// Poisson variate: multiplication method below mean 10, PTRS above.
    std::uint64_t poisson(double mean);

    /// Index drawn proportionally to non-negative `weights` (sum > 0).
    std::size_t choose(std::span<const double> weights);

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
};

}  // namespace srforge
