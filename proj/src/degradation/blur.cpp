#include "srforge/blur.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace srforge {

double BlurKernel::sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

namespace {

void normalize(BlurKernel& k) {
    const double s = k.sum();
    for (double& w : k.weights) w /= s;
}

void require_odd(int size, int min_size, const char* what) {
    if (size % 2 == 0 || size < min_size) {
        throw std::invalid_argument(std::string(what) + ": kernel size must be odd and >= " +
                                    std::to_string(min_size) + ", got " + std::to_string(size));
    }
}

}  // namespace

BlurKernel gen_gaussian_kernel(int size, double sigma_x, double sigma_y, double theta) {
    require_odd(size, 3, "gen_gaussian_kernel");
    if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) {
        throw std::invalid_argument("gen_gaussian_kernel: sigmas must be positive");
    }
    // Inverse covariance of R diag(sx^2, sy^2) R^T. Identical sigmas make the
    // rotation drop out exactly.
    double a, b, c;
    if (sigma_x == sigma_y) {
        a = c = 1.0 / (sigma_x * sigma_x);
        b = 0.0;
    } else {
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        const double ix = 1.0 / (sigma_x * sigma_x);
        const double iy = 1.0 / (sigma_y * sigma_y);
        a = ct * ct * ix + st * st * iy;
        b = ct * st * (ix - iy);
        c = st * st * ix + ct * ct * iy;
    }
    BlurKernel k;
    k.size = size;
    k.weights.assign(static_cast<std::size_t>(size) * size, 0.0);
    const int r = size / 2;
    for (int y = -r; y <= r; ++y) {
        for (int x = -r; x <= r; ++x) {
            const double q = a * x * x + 2.0 * b * x * y + c * y * y;
            k.weights[static_cast<std::size_t>(y + r) * size + (x + r)] = std::exp(-0.5 * q);
        }
    }
    normalize(k);
    return k;
}

BlurKernel gen_sinc_kernel(int size, double cutoff) {
    require_odd(size, 7, "gen_sinc_kernel");
    if (!(cutoff > 0.0) || cutoff > std::numbers::pi) {
        throw std::invalid_argument("gen_sinc_kernel: cutoff must lie in (0, pi], got " +
                                    std::to_string(cutoff));
    }
    BlurKernel k;
    k.size = size;
    k.weights.assign(static_cast<std::size_t>(size) * size, 0.0);
    const int r = size / 2;
    for (int y = -r; y <= r; ++y) {
        for (int x = -r; x <= r; ++x) {
            const double d = std::sqrt(static_cast<double>(x * x + y * y));
            double v;
            if (d == 0.0) {
                v = cutoff * cutoff / (4.0 * std::numbers::pi);
            } else {
                v = cutoff * std::cyl_bessel_j(1.0, cutoff * d) / (2.0 * std::numbers::pi * d);
            }
            k.weights[static_cast<std::size_t>(y + r) * size + (x + r)] = v;
        }
    }
    normalize(k);
    return k;
}

namespace {

int reflect(int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * (n - 1) - i;
    return i;
}

}  // namespace

TensorF apply_blur(const TensorF& img, const BlurKernel& kernel) {
    const Shape s = img.shape();
    const int r = kernel.size / 2;
    if (r >= s.h || r >= s.w) {
        throw std::invalid_argument("apply_blur: kernel of size " + std::to_string(kernel.size) +
                                    " is larger than the reflect-padded " + std::to_string(s.h) +
                                    "x" + std::to_string(s.w) + " image");
    }
    TensorF out(s);
    std::vector<int> xs(static_cast<std::size_t>(s.w + 2 * r));
    for (int i = 0; i < s.w + 2 * r; ++i) xs[static_cast<std::size_t>(i)] = reflect(i - r, s.w);
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            const float* src = img.plane(n, c);
            float* dst = out.plane(n, c);
            for (int y = 0; y < s.h; ++y) {
                for (int x = 0; x < s.w; ++x) {
                    double acc = 0.0;
                    for (int ky = 0; ky < kernel.size; ++ky) {
                        const float* row = src + static_cast<std::size_t>(reflect(y + ky - r, s.h)) * s.w;
                        const double* krow = kernel.weights.data() + static_cast<std::size_t>(ky) * kernel.size;
                        for (int kx = 0; kx < kernel.size; ++kx) {
                            acc += krow[kx] * row[xs[static_cast<std::size_t>(x + kx)]];
                        }
                    }
                    dst[static_cast<std::size_t>(y) * s.w + x] = static_cast<float>(acc);
                }
            }
        }
    }
    return out;
}

}  // namespace srforge
