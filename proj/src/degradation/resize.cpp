#include "srforge/resize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace srforge {

ResizeMethod parse_resize_method(std::string_view name) {
    if (name == "nearest") return ResizeMethod::nearest;
    if (name == "bilinear") return ResizeMethod::bilinear;
    if (name == "bicubic") return ResizeMethod::bicubic;
    if (name == "area") return ResizeMethod::area;
    if (name == "lanczos") return ResizeMethod::lanczos;
    throw std::invalid_argument("unknown resize method '" + std::string(name) + "'");
}

std::string_view to_string(ResizeMethod method) {
    switch (method) {
        case ResizeMethod::nearest: return "nearest";
        case ResizeMethod::bilinear: return "bilinear";
        case ResizeMethod::bicubic: return "bicubic";
        case ResizeMethod::area: return "area";
        case ResizeMethod::lanczos: return "lanczos";
    }
    return "unknown";
}

int scaled_dim(int dim, double s) {
    return std::max(1, static_cast<int>(std::round(dim * s)));
}

namespace {

struct Taps {
    int first = 0;
    std::vector<double> weights;
};

double sinc(double x) {
    if (x == 0.0) return 1.0;
    x *= std::numbers::pi;
    return std::sin(x) / x;
}

double filter(ResizeMethod m, double x) {
    x = std::abs(x);
    switch (m) {
        case ResizeMethod::bilinear: return x < 1.0 ? 1.0 - x : 0.0;
        case ResizeMethod::bicubic: {
            constexpr double a = -0.5;
            if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
            if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
            return 0.0;
        }
        case ResizeMethod::lanczos: return x < 3.0 ? sinc(x) * sinc(x / 3.0) : 0.0;
        default: return 0.0;
    }
}

double support(ResizeMethod m) {
    switch (m) {
        case ResizeMethod::bilinear: return 1.0;
        case ResizeMethod::bicubic: return 2.0;
        case ResizeMethod::lanczos: return 3.0;
        default: return 0.5;
    }
}

std::vector<Taps> compute_taps(int in, int out, ResizeMethod m) {
    std::vector<Taps> taps(static_cast<std::size_t>(out));
    const double scale = static_cast<double>(in) / out;
    for (int o = 0; o < out; ++o) {
        Taps& t = taps[static_cast<std::size_t>(o)];
        if (m == ResizeMethod::nearest) {
            t.first = std::min(in - 1, static_cast<int>(std::floor((o + 0.5) * scale)));
            t.weights = {1.0};
            continue;
        }
        if (m == ResizeMethod::area) {
            const double lo = o * scale;
            const double hi = (o + 1) * scale;
            const int first = static_cast<int>(std::floor(lo));
            const int last = std::min(in - 1, static_cast<int>(std::ceil(hi)) - 1);
            t.first = first;
            for (int i = first; i <= last; ++i) {
                t.weights.push_back(std::min<double>(hi, i + 1) - std::max<double>(lo, i));
            }
        } else {
            const double fscale = std::max(scale, 1.0);
            const double sup = support(m) * fscale;
            const double center = (o + 0.5) * scale;
            const int first = std::max(0, static_cast<int>(std::floor(center - sup + 0.5)));
            const int last = std::min(in, static_cast<int>(std::floor(center + sup + 0.5)));
            t.first = first;
            for (int i = first; i < last; ++i) {
                t.weights.push_back(filter(m, (i + 0.5 - center) / fscale));
            }
        }
        double total = 0.0;
        for (double w : t.weights) total += w;
        if (total == 0.0) {
            // Degenerate footprint: fall back to the nearest input sample.
            t.first = std::clamp(static_cast<int>(std::floor((o + 0.5) * scale)), 0, in - 1);
            t.weights = {1.0};
            continue;
        }
        for (double& w : t.weights) w /= total;
    }
    return taps;
}

}  // namespace

TensorF resize(const TensorF& img, int target_h, int target_w, ResizeMethod method) {
    if (target_h < 1 || target_w < 1) {
        throw std::invalid_argument("resize: target size must be positive, got " +
                                    std::to_string(target_h) + "x" + std::to_string(target_w));
    }
    const Shape s = img.shape();
    const auto ty = compute_taps(s.h, target_h, method);
    const auto tx = compute_taps(s.w, target_w, method);

    TensorF out(Shape{s.n, s.c, target_h, target_w});
    std::vector<double> rows(static_cast<std::size_t>(s.h) * target_w);
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            const float* src = img.plane(n, c);
            // Horizontal pass into `rows`, then vertical pass into the output.
            for (int y = 0; y < s.h; ++y) {
                const float* row = src + static_cast<std::size_t>(y) * s.w;
                for (int ox = 0; ox < target_w; ++ox) {
                    const Taps& t = tx[static_cast<std::size_t>(ox)];
                    double acc = 0.0;
                    for (std::size_t k = 0; k < t.weights.size(); ++k) {
                        acc += t.weights[k] * row[t.first + static_cast<int>(k)];
                    }
                    rows[static_cast<std::size_t>(y) * target_w + ox] = acc;
                }
            }
            float* dst = out.plane(n, c);
            for (int oy = 0; oy < target_h; ++oy) {
                const Taps& t = ty[static_cast<std::size_t>(oy)];
                for (int ox = 0; ox < target_w; ++ox) {
                    double acc = 0.0;
                    for (std::size_t k = 0; k < t.weights.size(); ++k) {
                        acc += t.weights[k] *
                               rows[static_cast<std::size_t>(t.first + static_cast<int>(k)) * target_w + ox];
                    }
                    dst[static_cast<std::size_t>(oy) * target_w + ox] =
                        static_cast<float>(std::clamp(acc, 0.0, 1.0));
                }
            }
        }
    }
    return out;
}

}  // namespace srforge
