#include "srforge/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace srforge {

namespace {

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t SeededRng::mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SeededRng::derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 0x9E3779B97F4A7C15ULL));
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) {
        x += 0x9E3779B97F4A7C15ULL;
        s = mix64(x);
    }
}

std::uint64_t SeededRng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double SeededRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int SeededRng::uniform_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
}

double SeededRng::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

template <typename T>
void fill_normal_pairs(SeededRng& rng, std::span<T> out, double std_dev) {
    std::size_t i = 0;
    for (; i + 1 < out.size(); i += 2) {
        const double r = std_dev * std::sqrt(-2.0 * std::log(1.0 - rng.uniform()));
        const double a = 2.0 * std::numbers::pi * rng.uniform();
        out[i] = static_cast<T>(r * std::cos(a));
        out[i + 1] = static_cast<T>(r * std::sin(a));
    }
    if (i < out.size()) out[i] = static_cast<T>(std_dev * rng.normal());
}

}  // namespace

void SeededRng::fill_normal(std::span<float> out, double std_dev) { fill_normal_pairs(*this, out, std_dev); }
void SeededRng::fill_normal(std::span<double> out, double std_dev) { fill_normal_pairs(*this, out, std_dev); }

std::uint64_t SeededRng::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument("poisson: mean must be finite and non-negative");
    }
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }
    // Transformed rejection with squeeze (Hormann 1993).
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

std::size_t SeededRng::choose(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("choose: negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("choose: weights sum to zero");
    double r = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (r < weights[i]) return i;
        r -= weights[i];
    }
    // Rounding can leave r just past the last positive weight.
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) return i;
    }
    return 0;
}

}  // namespace srforge
