#pragma once

// Seeded synthetic test images.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "srforge/rng.hpp"
#include "srforge/tensor.hpp"

namespace srforge::testing {

/// Fundus-like RGB image: dark surround, bright circular field with a
/// vignette, an optic disc and a few curved vessels. Smooth enough that
/// bicubic interpolation is a meaningful baseline.
inline TensorF synthetic_fundus(int h, int w, std::uint64_t seed) {
    SeededRng rng(seed);
    TensorF img({1, 3, h, w});
    const double cx = w * rng.uniform(0.45, 0.55), cy = h * rng.uniform(0.45, 0.55);
    const double radius = 0.46 * std::min(h, w);
    const double dx = cx + rng.uniform(-0.25, 0.25) * radius, dy = cy + rng.uniform(-0.2, 0.2) * radius;
    const double disc = radius * rng.uniform(0.12, 0.18);
    struct Vessel {
        double a, f, p, width, depth;
    };
    Vessel vessels[6];
    for (auto& v : vessels) {
        v = {rng.uniform(0, 2 * std::numbers::pi), rng.uniform(1.5, 4.0), rng.uniform(0, 2 * std::numbers::pi),
             rng.uniform(0.8, 2.2), rng.uniform(0.15, 0.35)};
    }
    const double tint = rng.uniform(-0.05, 0.05);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double rx = x + 0.5 - cx, ry = y + 0.5 - cy;
            const double r = std::hypot(rx, ry) / radius;
            double base = r < 1.0 ? 0.55 * (1.0 - 0.45 * r * r) : 0.02;
            const double edge = std::clamp((1.0 - r) * radius / 2.0, 0.0, 1.0);
            base = 0.02 + (base - 0.02) * edge;
            double shade = 0.0;
            const double dd = std::hypot(x + 0.5 - dx, y + 0.5 - dy);
            shade += 0.35 * std::exp(-0.5 * (dd / disc) * (dd / disc));
            double vessel = 0.0;
            const double ang = std::atan2(y + 0.5 - dy, x + 0.5 - dx);
            for (const auto& v : vessels) {
                const double target = v.a + 0.35 * std::sin(v.f * dd / radius + v.p);
                double diff = std::remainder(ang - target, 2 * std::numbers::pi) * dd;
                vessel += v.depth * std::exp(-0.5 * (diff / v.width) * (diff / v.width)) * (dd > disc ? 1.0 : 0.0);
            }
            const double lum = std::clamp(base + shade * edge - vessel * edge * base * 1.4, 0.0, 1.0);
            img.at(0, 0, y, x) = static_cast<float>(std::clamp(lum * (1.35 + tint), 0.0, 1.0));
            img.at(0, 1, y, x) = static_cast<float>(std::clamp(lum * 0.62, 0.0, 1.0));
            img.at(0, 2, y, x) = static_cast<float>(std::clamp(lum * (0.28 - tint), 0.0, 1.0));
        }
    }
    return img;
}

/// Uniform noise image in [0, 1].
inline TensorF noise_image(Shape s, std::uint64_t seed) {
    SeededRng rng(seed);
    TensorF t(s);
    for (float& v : t.data()) v = static_cast<float>(rng.uniform());
    return t;
}

inline double psnr_ref(const TensorF& a, const TensorF& b) {
    double se = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        const double d = (static_cast<double>(a[i]) - b[i]) * 255.0;
        se += d * d;
    }
    const double mse = se / static_cast<double>(a.numel());
    return mse == 0.0 ? INFINITY : 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace srforge::testing
