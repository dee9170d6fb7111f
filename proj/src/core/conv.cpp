#include <Eigen/Core>
#include <algorithm>
#include <cstring>

#include "conv_kernels.hpp"

namespace srforge::detail {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using StridedMap = Eigen::Map<RowMat<T>, 0, Eigen::OuterStride<>>;
template <typename T>
using ConstStridedMap = Eigen::Map<const RowMat<T>, 0, Eigen::OuterStride<>>;
template <typename T>
using ConstMap = Eigen::Map<const RowMat<T>>;
template <typename T>
using Map = Eigen::Map<RowMat<T>>;

// Upper bound on the im2col scratch buffer, in elements.
constexpr std::size_t kColumnBudget = std::size_t{1} << 21;

int rows_per_chunk(const ConvGeometry& g) {
    const std::size_t per_row = static_cast<std::size_t>(g.k()) * g.out_w;
    return static_cast<int>(std::max<std::size_t>(1, kColumnBudget / std::max<std::size_t>(1, per_row)));
}

/// Columns for output rows [r0, r1) of image `n`: col[k][p], k over (ci, ky, kx).
template <typename T>
void im2col(const T* image, const ConvGeometry& g, int r0, int r1, T* col) {
    const int len = (r1 - r0) * g.out_w;
    std::size_t k = 0;
    for (int ci = 0; ci < g.in_c; ++ci) {
        const T* plane = image + static_cast<std::size_t>(ci) * g.in_h * g.in_w;
        for (int ky = 0; ky < g.kh; ++ky) {
            for (int kx = 0; kx < g.kw; ++kx, ++k) {
                T* dst = col + k * len;
                for (int oy = r0; oy < r1; ++oy) {
                    const int iy = oy * g.stride - g.padding + ky;
                    T* row = dst + static_cast<std::size_t>(oy - r0) * g.out_w;
                    if (iy < 0 || iy >= g.in_h) {
                        std::fill(row, row + g.out_w, T(0));
                        continue;
                    }
                    const T* src = plane + static_cast<std::size_t>(iy) * g.in_w;
                    for (int ox = 0; ox < g.out_w; ++ox) {
                        const int ix = ox * g.stride - g.padding + kx;
                        row[ox] = (ix >= 0 && ix < g.in_w) ? src[ix] : T(0);
                    }
                }
            }
        }
    }
}

template <typename T>
void col2im_add(const T* col, const ConvGeometry& g, int r0, int r1, T* image) {
    const int len = (r1 - r0) * g.out_w;
    std::size_t k = 0;
    for (int ci = 0; ci < g.in_c; ++ci) {
        T* plane = image + static_cast<std::size_t>(ci) * g.in_h * g.in_w;
        for (int ky = 0; ky < g.kh; ++ky) {
            for (int kx = 0; kx < g.kw; ++kx, ++k) {
                const T* src = col + k * len;
                for (int oy = r0; oy < r1; ++oy) {
                    const int iy = oy * g.stride - g.padding + ky;
                    if (iy < 0 || iy >= g.in_h) continue;
                    const T* row = src + static_cast<std::size_t>(oy - r0) * g.out_w;
                    T* dst = plane + static_cast<std::size_t>(iy) * g.in_w;
                    for (int ox = 0; ox < g.out_w; ++ox) {
                        const int ix = ox * g.stride - g.padding + kx;
                        if (ix >= 0 && ix < g.in_w) dst[ix] += row[ox];
                    }
                }
            }
        }
    }
}

}  // namespace

template <typename T>
void conv2d_forward(const T* input, const T* weight, const T* bias, const ConvGeometry& g,
                    int batch, T* output) {
    const int chunk = rows_per_chunk(g);
    const std::size_t in_img = static_cast<std::size_t>(g.in_c) * g.in_h * g.in_w;
    const std::size_t out_plane = static_cast<std::size_t>(g.out_h) * g.out_w;
    const std::size_t out_img = static_cast<std::size_t>(g.out_c) * out_plane;
    std::vector<T> col(static_cast<std::size_t>(g.k()) * std::min(chunk, g.out_h) * g.out_w);
    ConstMap<T> wmat(weight, g.out_c, g.k());

    for (int n = 0; n < batch; ++n) {
        const T* img = input + n * in_img;
        T* out = output + n * out_img;
        for (int r0 = 0; r0 < g.out_h; r0 += chunk) {
            const int r1 = std::min(g.out_h, r0 + chunk);
            const int len = (r1 - r0) * g.out_w;
            im2col(img, g, r0, r1, col.data());
            ConstMap<T> cmat(col.data(), g.k(), len);
            StridedMap<T> omat(out + static_cast<std::size_t>(r0) * g.out_w, g.out_c, len,
                               Eigen::OuterStride<>(static_cast<Eigen::Index>(out_plane)));
            omat.noalias() = wmat * cmat;
        }
        if (bias != nullptr) {
            for (int co = 0; co < g.out_c; ++co) {
                T* p = out + co * out_plane;
                const T b = bias[co];
                for (std::size_t i = 0; i < out_plane; ++i) p[i] += b;
            }
        }
    }
}

template <typename T>
void conv2d_backward(const T* input, const T* weight, const T* grad_out, const ConvGeometry& g,
                     int batch, T* grad_input, T* grad_weight, T* grad_bias) {
    const int chunk = rows_per_chunk(g);
    const std::size_t in_img = static_cast<std::size_t>(g.in_c) * g.in_h * g.in_w;
    const std::size_t out_plane = static_cast<std::size_t>(g.out_h) * g.out_w;
    const std::size_t out_img = static_cast<std::size_t>(g.out_c) * out_plane;
    const std::size_t col_size = static_cast<std::size_t>(g.k()) * std::min(chunk, g.out_h) * g.out_w;
    std::vector<T> col(grad_weight != nullptr ? col_size : 0);
    std::vector<T> dcol(grad_input != nullptr ? col_size : 0);
    ConstMap<T> wmat(weight, g.out_c, g.k());

    for (int n = 0; n < batch; ++n) {
        const T* img = input + n * in_img;
        const T* gout = grad_out + n * out_img;
        for (int r0 = 0; r0 < g.out_h; r0 += chunk) {
            const int r1 = std::min(g.out_h, r0 + chunk);
            const int len = (r1 - r0) * g.out_w;
            ConstStridedMap<T> gmat(gout + static_cast<std::size_t>(r0) * g.out_w, g.out_c, len,
                                    Eigen::OuterStride<>(static_cast<Eigen::Index>(out_plane)));
            if (grad_weight != nullptr) {
                im2col(img, g, r0, r1, col.data());
                ConstMap<T> cmat(col.data(), g.k(), len);
                Map<T> gw(grad_weight, g.out_c, g.k());
                gw.noalias() += gmat * cmat.transpose();
            }
            if (grad_input != nullptr) {
                Map<T> dmat(dcol.data(), g.k(), len);
                dmat.noalias() = wmat.transpose() * gmat;
                col2im_add(dcol.data(), g, r0, r1, grad_input + n * in_img);
            }
        }
        if (grad_bias != nullptr) {
            for (int co = 0; co < g.out_c; ++co) {
                const T* p = gout + co * out_plane;
                T acc = T(0);
                for (std::size_t i = 0; i < out_plane; ++i) acc += p[i];
                grad_bias[co] += acc;
            }
        }
    }
}

template void conv2d_forward<float>(const float*, const float*, const float*, const ConvGeometry&,
                                    int, float*);
template void conv2d_forward<double>(const double*, const double*, const double*,
                                     const ConvGeometry&, int, double*);
template void conv2d_backward<float>(const float*, const float*, const float*, const ConvGeometry&,
                                     int, float*, float*, float*);
template void conv2d_backward<double>(const double*, const double*, const double*,
                                      const ConvGeometry&, int, double*, double*, double*);

}  // namespace srforge::detail
