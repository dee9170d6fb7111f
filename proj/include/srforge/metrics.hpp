#pragma once

#include "srforge/tensor.hpp"

namespace srforge {

/// 10 log10(peak^2 / MSE) over every element; +infinity when MSE is 0.
double psnr(const TensorD& a, const TensorD& b, double peak = 255.0);

/// Mean SSIM over valid 11x11 Gaussian windows (sigma 1.5) with
/// C1 = (0.01 peak)^2 and C2 = (0.03 peak)^2. Three-channel inputs are
/// compared on BT.601 luma; single-channel inputs directly. Batches average
/// over images. Throws ShapeError when an image is smaller than the window.
double ssim(const TensorD& a, const TensorD& b, double peak = 255.0);

/// round(clamp(v, 0, 1) * 255) per element.
TensorD to_levels(const TensorF& img);

/// 0.299 R + 0.587 G + 0.114 B as a single-channel tensor.
TensorD luma(const TensorD& rgb);

}  // namespace srforge
