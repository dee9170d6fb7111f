#include "srforge/noise.hpp"

#include <algorithm>
#include <stdexcept>

namespace srforge {

void clamp01(TensorF& img) {
    for (float& v : img.data()) v = std::clamp(v, 0.0f, 1.0f);
}

TensorF gaussian_noise_field(const Shape& shape, double sigma, bool gray, SeededRng& rng) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian noise: sigma must be >= 0");
    TensorF field(shape);
    if (sigma == 0.0) return field;
    const std::size_t plane = shape.plane();
    for (int n = 0; n < shape.n; ++n) {
        if (gray) {
            float* first = field.plane(n, 0);
            for (std::size_t i = 0; i < plane; ++i) first[i] = static_cast<float>(sigma * rng.normal());
            for (int c = 1; c < shape.c; ++c) std::copy_n(first, plane, field.plane(n, c));
            continue;
        }
        for (int c = 0; c < shape.c; ++c) {
            float* p = field.plane(n, c);
            for (std::size_t i = 0; i < plane; ++i) p[i] = static_cast<float>(sigma * rng.normal());
        }
    }
    return field;
}

TensorF poisson_noise_field(const TensorF& img, double scale, bool gray, SeededRng& rng) {
    if (!(scale > 0.0)) throw std::invalid_argument("poisson noise: scale must be > 0");
    const double lambda = 256.0 / (scale * scale);
    const Shape s = img.shape();
    const std::size_t plane = s.plane();
    TensorF field(s);
    auto shot = [&](double x) {
        x = std::clamp(x, 0.0, 1.0);
        return static_cast<double>(rng.poisson(x * lambda)) / lambda - x;
    };
    for (int n = 0; n < s.n; ++n) {
        if (gray && s.c == 3) {
            const float* r = img.plane(n, 0);
            const float* g = img.plane(n, 1);
            const float* b = img.plane(n, 2);
            float* first = field.plane(n, 0);
            for (std::size_t i = 0; i < plane; ++i) {
                first[i] = static_cast<float>(shot(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]));
            }
            std::copy_n(first, plane, field.plane(n, 1));
            std::copy_n(first, plane, field.plane(n, 2));
            continue;
        }
        for (int c = 0; c < s.c; ++c) {
            const float* src = img.plane(n, c);
            float* p = field.plane(n, c);
            for (std::size_t i = 0; i < plane; ++i) p[i] = static_cast<float>(shot(src[i]));
            if (gray) {
                for (int c2 = 1; c2 < s.c; ++c2) std::copy_n(p, plane, field.plane(n, c2));
                break;
            }
        }
    }
    return field;
}

namespace {

TensorF add_field(const TensorF& img, const TensorF& field) {
    TensorF out(img.shape());
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = img[i] + field[i];
    clamp01(out);
    return out;
}

}  // namespace

TensorF add_gaussian_noise(const TensorF& img, double sigma, bool gray, SeededRng& rng) {
    return add_field(img, gaussian_noise_field(img.shape(), sigma, gray, rng));
}

TensorF add_poisson_noise(const TensorF& img, double scale, bool gray, SeededRng& rng) {
    return add_field(img, poisson_noise_field(img, scale, gray, rng));
}

}  // namespace srforge
