#include "srforge/jpeg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace srforge {

namespace {

constexpr std::array<int, 64> kLumaBase = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<int, 64> kChromaBase = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99,
    99, 99, 47, 66, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

void check_quality(int quality) {
    if (quality < 1 || quality > 100) {
        throw std::invalid_argument("jpeg quality must lie in [1, 100], got " + std::to_string(quality));
    }
}

std::array<int, 64> scale_table(const std::array<int, 64>& base, int quality) {
    check_quality(quality);
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    std::array<int, 64> out{};
    for (std::size_t i = 0; i < 64; ++i) {
        out[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
    }
    return out;
}

/// Orthonormal 8-point DCT-II basis: basis[u][x].
struct DctBasis {
    double m[8][8];
    DctBasis() {
        for (int u = 0; u < 8; ++u) {
            const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
            for (int x = 0; x < 8; ++x) {
                m[u][x] = cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
            }
        }
    }
};

const DctBasis& basis() {
    static const DctBasis b;
    return b;
}

/// Quantizes one 8x8 block of level-shifted samples in place.
void process_block(double block[8][8], const std::array<int, 64>& q) {
    const auto& b = basis().m;
    double tmp[8][8];
    double coef[8][8];
    for (int y = 0; y < 8; ++y) {
        for (int u = 0; u < 8; ++u) {
            double acc = 0.0;
            for (int x = 0; x < 8; ++x) acc += b[u][x] * block[y][x];
            tmp[y][u] = acc;
        }
    }
    for (int v = 0; v < 8; ++v) {
        for (int u = 0; u < 8; ++u) {
            double acc = 0.0;
            for (int y = 0; y < 8; ++y) acc += b[v][y] * tmp[y][u];
            const double step = q[static_cast<std::size_t>(v * 8 + u)];
            coef[v][u] = std::round(acc / step) * step;
        }
    }
    for (int v = 0; v < 8; ++v) {
        for (int x = 0; x < 8; ++x) {
            double acc = 0.0;
            for (int u = 0; u < 8; ++u) acc += b[u][x] * coef[v][u];
            tmp[v][x] = acc;
        }
    }
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            double acc = 0.0;
            for (int v = 0; v < 8; ++v) acc += b[v][y] * tmp[v][x];
            block[y][x] = acc;
        }
    }
}

int reflect(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

/// Runs the block codec over a padded plane of level values (0..255).
void code_plane(std::vector<double>& plane, int ph, int pw, const std::array<int, 64>& q) {
    double block[8][8];
    for (int by = 0; by < ph; by += 8) {
        for (int bx = 0; bx < pw; bx += 8) {
            for (int y = 0; y < 8; ++y) {
                for (int x = 0; x < 8; ++x) {
                    block[y][x] = plane[static_cast<std::size_t>(by + y) * pw + bx + x] - 128.0;
                }
            }
            process_block(block, q);
            for (int y = 0; y < 8; ++y) {
                for (int x = 0; x < 8; ++x) {
                    plane[static_cast<std::size_t>(by + y) * pw + bx + x] = block[y][x] + 128.0;
                }
            }
        }
    }
}

double to_level(float v) { return std::round(std::clamp(static_cast<double>(v), 0.0, 1.0) * 255.0); }

float from_level(double v) { return static_cast<float>(std::clamp(std::round(v), 0.0, 255.0) / 255.0); }

}  // namespace

std::array<int, 64> jpeg_luma_table(int quality) { return scale_table(kLumaBase, quality); }
std::array<int, 64> jpeg_chroma_table(int quality) { return scale_table(kChromaBase, quality); }

TensorF jpeg_roundtrip(const TensorF& img, int quality) {
    check_quality(quality);
    const Shape s = img.shape();
    if (s.c != 1 && s.c != 3) {
        throw std::invalid_argument("jpeg_roundtrip: expected 1 or 3 channels, got " + std::to_string(s.c));
    }
    const auto luma_q = jpeg_luma_table(quality);
    const auto chroma_q = jpeg_chroma_table(quality);
    const int ph = (s.h + 7) / 8 * 8;
    const int pw = (s.w + 7) / 8 * 8;
    const std::size_t padded = static_cast<std::size_t>(ph) * pw;

    TensorF out(s);
    std::vector<std::vector<double>> planes(static_cast<std::size_t>(s.c), std::vector<double>(padded));
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            const float* src = img.plane(n, c);
            auto& p = planes[static_cast<std::size_t>(c)];
            for (int y = 0; y < ph; ++y) {
                const int sy = reflect(y, s.h);
                for (int x = 0; x < pw; ++x) {
                    p[static_cast<std::size_t>(y) * pw + x] =
                        to_level(src[static_cast<std::size_t>(sy) * s.w + reflect(x, s.w)]);
                }
            }
        }
        if (s.c == 1) {
            code_plane(planes[0], ph, pw, luma_q);
        } else {
            auto& r = planes[0];
            auto& g = planes[1];
            auto& b = planes[2];
            for (std::size_t i = 0; i < padded; ++i) {
                const double y = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
                const double cb = -0.168736 * r[i] - 0.331264 * g[i] + 0.5 * b[i] + 128.0;
                const double cr = 0.5 * r[i] - 0.418688 * g[i] - 0.081312 * b[i] + 128.0;
                r[i] = y;
                g[i] = cb;
                b[i] = cr;
            }
            code_plane(planes[0], ph, pw, luma_q);
            code_plane(planes[1], ph, pw, chroma_q);
            code_plane(planes[2], ph, pw, chroma_q);
            for (std::size_t i = 0; i < padded; ++i) {
                const double y = r[i];
                const double cb = g[i] - 128.0;
                const double cr = b[i] - 128.0;
                r[i] = y + 1.402 * cr;
                g[i] = y - 0.344136 * cb - 0.714136 * cr;
                b[i] = y + 1.772 * cb;
            }
        }
        for (int c = 0; c < s.c; ++c) {
            const auto& p = planes[static_cast<std::size_t>(c)];
            float* dst = out.plane(n, c);
            for (int y = 0; y < s.h; ++y) {
                for (int x = 0; x < s.w; ++x) {
                    dst[static_cast<std::size_t>(y) * s.w + x] = from_level(p[static_cast<std::size_t>(y) * pw + x]);
                }
            }
        }
    }
    return out;
}

}  // namespace srforge
