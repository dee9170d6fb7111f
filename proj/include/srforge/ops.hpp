#pragma once

#include <vector>

#include "srforge/autograd.hpp"
#include "srforge/tensor.hpp"

// Differentiable operations. Each op computes its result eagerly and, when any
// input requires a gradient, records a backward closure on that input's tape.
// All ops are instantiated for float (training) and double (gradient checks).

namespace srforge {

/// Zero-padded cross-correlation. weight is [Cout, Cin, kh, kw].
template <typename T>
Var<T> conv2d(const Var<T>& input, const Var<T>& weight, int stride, int padding);

/// As above with a per-output-channel bias of shape [Cout, 1, 1, 1].
template <typename T>
Var<T> conv2d(const Var<T>& input, const Var<T>& weight, const Var<T>& bias, int stride,
              int padding);

template <typename T>
Var<T> leaky_relu(const Var<T>& x, T slope = T(0.2));

/// Pixel replication by `factor` in both spatial directions.
template <typename T>
Var<T> nearest_upsample(const Var<T>& x, int factor);

/// Bilinear resampling by an integer factor with half-pixel centers
/// (align_corners = false).
template <typename T>
Var<T> bilinear_upsample(const Var<T>& x, int factor);

/// Space-to-depth: [N,C,H,W] -> [N,C*f*f,H/f,W/f]. Output channel
/// c*f*f + dy*f + dx holds input (c, y*f+dy, x*f+dx).
template <typename T>
Var<T> pixel_unshuffle(const Var<T>& x, int factor);

/// Inverse of pixel_unshuffle.
template <typename T>
Var<T> pixel_shuffle(const Var<T>& x, int factor);

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> scale(const Var<T>& a, T factor);
template <typename T>
Var<T> add_scalar(const Var<T>& a, T offset);

/// a - s where s is a one-element value broadcast over a.
template <typename T>
Var<T> sub_broadcast(const Var<T>& a, const Var<T>& s);

/// a + factor * b, the residual-scaling pattern.
template <typename T>
Var<T> add_scaled(const Var<T>& a, const Var<T>& b, T factor);

template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& parts);

/// (1/n) * sum |a_i - b_i| as a one-element value.
template <typename T>
Var<T> mean_abs_diff(const Var<T>& a, const Var<T>& b);

template <typename T>
Var<T> mean(const Var<T>& x);
template <typename T>
Var<T> sum(const Var<T>& x);

/// mean(log(1 + exp(x))), evaluated without overflow.
template <typename T>
Var<T> mean_softplus(const Var<T>& x);

/// weight / sigma with sigma = u^T W v, W the [Cout, rest] matrix view of
/// `weight`. u and v are treated as constants.
template <typename T>
Var<T> spectral_divide(const Var<T>& weight, const Tensor<T>& u, const Tensor<T>& v, T* sigma_out = nullptr);

}  // namespace srforge
