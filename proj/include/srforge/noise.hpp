#pragma once

#include "srforge/rng.hpp"
#include "srforge/tensor.hpp"

namespace srforge {

/// Zero-mean Gaussian field with standard deviation `sigma` (image units).
/// With `gray`, one plane of noise is shared by every channel.
TensorF gaussian_noise_field(const Shape& shape, double sigma, bool gray, SeededRng& rng);

/// Shot-noise field for `img`: Poisson(x * lambda) / lambda - x with
/// lambda = 256 / scale^2. With `gray` the field is computed on BT.601 luma
/// and shared by every channel.
TensorF poisson_noise_field(const TensorF& img, double scale, bool gray, SeededRng& rng);

/// img + gaussian_noise_field(...), clamped to [0, 1].
TensorF add_gaussian_noise(const TensorF& img, double sigma, bool gray, SeededRng& rng);

/// img + poisson_noise_field(...), clamped to [0, 1].
TensorF add_poisson_noise(const TensorF& img, double scale, bool gray, SeededRng& rng);

void clamp01(TensorF& img);

}  // namespace srforge
