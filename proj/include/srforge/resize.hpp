#pragma once

#include <string>
#include <string_view>

#include "srforge/tensor.hpp"

namespace srforge {

enum class ResizeMethod { nearest, bilinear, bicubic, area, lanczos };

ResizeMethod parse_resize_method(std::string_view name);
std::string_view to_string(ResizeMethod method);

/// Resamples every plane of `img` to target_h x target_w.
///
/// Filtered methods (bilinear, bicubic with a = -0.5, lanczos with 3 lobes)
/// widen their support by the scale factor when shrinking, so downsampling
/// is antialiased. `area` weights input pixels by exact overlap with each
/// output footprint; `nearest` samples the pixel under each output center.
/// Taps falling outside the image are dropped and the remaining weights
/// renormalized. Results are clamped to [0, 1].
TensorF resize(const TensorF& img, int target_h, int target_w, ResizeMethod method);

/// Dimension after scaling by `s`: round half away from zero, at least 1.
int scaled_dim(int dim, double s);

}  // namespace srforge
