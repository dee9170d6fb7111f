#pragma once

#include <cstddef>

namespace srforge::detail {

struct ConvGeometry {
    int in_c, in_h, in_w;
    int out_c, out_h, out_w;
    int kh, kw;
    int stride, padding;

    [[nodiscard]] int k() const { return in_c * kh * kw; }
};

template <typename T>
void conv2d_forward(const T* input, const T* weight, const T* bias, const ConvGeometry& g,
                    int batch, T* output);

/// Accumulates (+=) into whichever of grad_input/grad_weight/grad_bias is non-null.
template <typename T>
void conv2d_backward(const T* input, const T* weight, const T* grad_out, const ConvGeometry& g,
                     int batch, T* grad_input, T* grad_weight, T* grad_bias);

}  // namespace srforge::detail
