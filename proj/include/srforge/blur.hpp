#pragma once

#include <vector>

#include "srforge/tensor.hpp"

namespace srforge {

/// Square, odd-sized, normalized 2D filter.
struct BlurKernel {
    int size = 1;
    std::vector<double> weights{1.0};

    [[nodiscard]] double at(int y, int x) const {
        return weights[static_cast<std::size_t>(y) * size + x];
    }
    [[nodiscard]] double sum() const;
};

/// Sampled Gaussian with standard deviations sigma_x / sigma_y along axes
/// rotated by theta (radians), normalized to unit sum.
BlurKernel gen_gaussian_kernel(int size, double sigma_x, double sigma_y, double theta);

/// Circular ideal low-pass (2D sinc / jinc) at angular cutoff `cutoff` in
/// (0, pi], normalized to unit sum. Negative side lobes produce ringing and
/// overshoot on edges.
BlurKernel gen_sinc_kernel(int size, double cutoff);

/// Per-plane 2D filtering with reflect padding (edge pixel not repeated).
/// The kernel radius must be smaller than both image dimensions.
TensorF apply_blur(const TensorF& img, const BlurKernel& kernel);

}  // namespace srforge
