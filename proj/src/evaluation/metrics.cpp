#include "srforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace srforge {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

std::vector<double> gaussian_taps() {
    std::vector<double> taps(kWindow);
    double total = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kWindow / 2;
        taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        total += taps[static_cast<std::size_t>(i)];
    }
    for (double& t : taps) t /= total;
    return taps;
}

/// Separable valid-region filtering of an h x w plane.
std::vector<double> filter_valid(const double* src, int h, int w, const std::vector<double>& taps) {
    const int oh = h - kWindow + 1;
    const int ow = w - kWindow + 1;
    std::vector<double> rows(static_cast<std::size_t>(h) * ow);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) acc += taps[static_cast<std::size_t>(k)] * src[static_cast<std::size_t>(y) * w + x + k];
            rows[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) acc += taps[static_cast<std::size_t>(k)] * rows[static_cast<std::size_t>(y + k) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    return out;
}

double ssim_plane(const double* a, const double* b, int h, int w, double peak) {
    static const std::vector<double> taps = gaussian_taps();
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<double> aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const auto mu_a = filter_valid(a, h, w, taps);
    const auto mu_b = filter_valid(b, h, w, taps);
    const auto e_aa = filter_valid(aa.data(), h, w, taps);
    const auto e_bb = filter_valid(bb.data(), h, w, taps);
    const auto e_ab = filter_valid(ab.data(), h, w, taps);
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i], mb = mu_b[i];
        const double va = e_aa[i] - ma * ma;
        const double vb = e_bb[i] - mb * mb;
        const double cov = e_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return total / static_cast<double>(mu_a.size());
}

}  // namespace

double psnr(const TensorD& a, const TensorD& b, double peak) {
    require_same_shape(a.shape(), b.shape(), "psnr");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(a.numel());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

TensorD luma(const TensorD& rgb) {
    const Shape s = rgb.shape();
    if (s.c != 3) throw ShapeError("luma: expected 3 channels, got " + s.str());
    TensorD y({s.n, 1, s.h, s.w});
    for (int n = 0; n < s.n; ++n) {
        const double* r = rgb.plane(n, 0);
        const double* g = rgb.plane(n, 1);
        const double* b = rgb.plane(n, 2);
        double* out = y.plane(n, 0);
        for (std::size_t i = 0; i < s.plane(); ++i) out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    }
    return y;
}

double ssim(const TensorD& a, const TensorD& b, double peak) {
    require_same_shape(a.shape(), b.shape(), "ssim");
    const Shape s = a.shape();
    if (s.h < kWindow || s.w < kWindow) {
        throw ShapeError("ssim: image " + s.str() + " is smaller than the 11x11 window");
    }
    if (s.c != 1 && s.c != 3) throw ShapeError("ssim: expected 1 or 3 channels, got " + s.str());
    const TensorD ya = s.c == 3 ? luma(a) : a;
    const TensorD yb = s.c == 3 ? luma(b) : b;
    double total = 0.0;
    for (int n = 0; n < s.n; ++n) total += ssim_plane(ya.plane(n, 0), yb.plane(n, 0), s.h, s.w, peak);
    return total / s.n;
}

TensorD to_levels(const TensorF& img) {
    TensorD out(img.shape());
    for (std::size_t i = 0; i < img.numel(); ++i) {
        out[i] = std::round(std::clamp(static_cast<double>(img[i]), 0.0, 1.0) * 255.0);
    }
    return out;
}

}  // namespace srforge
