#include <algorithm>
#include <cmath>
#include <string>

#include "srforge/networks.hpp"

namespace srforge {

namespace {

constexpr double kEps = 1e-12;

void normalize(std::vector<double>& x) {
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::max(std::sqrt(norm), kEps);
    for (double& v : x) v /= norm;
}

}  // namespace

template <typename T>
SpectralNormResult<T> spectral_normalize(const Tensor<T>& weight, const Tensor<T>& u, int iterations) {
    const std::size_t rows = static_cast<std::size_t>(weight.n());
    const std::size_t cols = weight.numel() / rows;
    if (u.numel() != rows) {
        throw ShapeError("spectral_normalize: u has " + std::to_string(u.numel()) + " elements, weight has " +
                         std::to_string(rows) + " rows");
    }
    if (iterations < 0) throw std::invalid_argument("spectral_normalize: iterations must be >= 0");
    const T* w = weight.ptr();
    std::vector<double> uu(u.data().begin(), u.data().end());
    std::vector<double> vv(cols);

    auto right = [&] {
        std::fill(vv.begin(), vv.end(), 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            const double ur = uu[r];
            for (std::size_t c = 0; c < cols; ++c) vv[c] += static_cast<double>(w[r * cols + c]) * ur;
        }
        normalize(vv);
    };
    auto left = [&] {
        for (std::size_t r = 0; r < rows; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < cols; ++c) acc += static_cast<double>(w[r * cols + c]) * vv[c];
            uu[r] = acc;
        }
        normalize(uu);
    };

    if (iterations == 0) {
        right();
    } else {
        for (int i = 0; i < iterations; ++i) {
            right();
            left();
        }
    }

    double sigma = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += static_cast<double>(w[r * cols + c]) * vv[c];
        sigma += uu[r] * acc;
    }
    sigma = std::max(sigma, kEps);

    SpectralNormResult<T> out{Tensor<T>(weight.shape()), Tensor<T>(u.shape()),
                              Tensor<T>(Shape{static_cast<int>(cols), 1, 1, 1}), static_cast<T>(sigma)};
    for (std::size_t i = 0; i < weight.numel(); ++i) out.weight[i] = static_cast<T>(w[i] / sigma);
    for (std::size_t r = 0; r < rows; ++r) out.u[r] = static_cast<T>(uu[r]);
    for (std::size_t c = 0; c < cols; ++c) out.v[c] = static_cast<T>(vv[c]);
    return out;
}

template SpectralNormResult<float> spectral_normalize<float>(const Tensor<float>&, const Tensor<float>&, int);
template SpectralNormResult<double> spectral_normalize<double>(const Tensor<double>&, const Tensor<double>&, int);

}  // namespace srforge
