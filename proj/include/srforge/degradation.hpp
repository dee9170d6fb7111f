#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "srforge/blur.hpp"
#include "srforge/config.hpp"
#include "srforge/resize.hpp"
#include "srforge/rng.hpp"
#include "srforge/tensor.hpp"

namespace srforge {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Range&, const Range&) = default;
};

enum class KernelFamily { isotropic, anisotropic, sinc };
enum class NoiseKind { gaussian, poisson };

/// Relative weights of the resize methods a degradation step may pick,
/// in the order nearest, bilinear, bicubic, area.
using ResizeWeights = std::array<double, 4>;

struct BlurStageConfig {
    double skip_prob = 0.0;
    /// isotropic, anisotropic, sinc
    std::array<double, 3> family_weights{0.45, 0.45, 0.1};
    std::vector<int> kernel_sizes{7, 9, 11, 13, 15, 17, 19, 21};
    Range sigma{0.2, 3.0};
    Range rotation{-3.141592653589793, 3.141592653589793};
    Range sinc_cutoff{1.0471975511965976, 3.141592653589793};
};

struct ResizeStageConfig {
    double skip_prob = 0.0;
    Range scale{0.15, 1.5};
    ResizeWeights method_weights{0.0, 1.0, 1.0, 1.0};
};

struct NoiseStageConfig {
    double skip_prob = 0.0;
    /// gaussian, poisson
    std::array<double, 2> kind_weights{0.5, 0.5};
    /// Standard deviation in 8-bit levels (divided by 255 when applied).
    Range gaussian_sigma{1.0, 30.0};
    Range poisson_scale{0.05, 3.0};
    double gray_prob = 0.4;
};

struct JpegStageConfig {
    double skip_prob = 0.0;
    int quality_lo = 30;
    int quality_hi = 95;
};

struct DegradationStageConfig {
    BlurStageConfig blur;
    ResizeStageConfig resize;
    NoiseStageConfig noise;
    JpegStageConfig jpeg;
};

/// Two classical degradation stages followed by the final resize to the
/// LR size, optionally combined with a sinc filter around the last JPEG.
struct DegradationConfig {
    DegradationStageConfig stage1;
    DegradationStageConfig stage2;
    double final_sinc_probability = 0.8;
    Range final_sinc_cutoff{1.0471975511965976, 3.141592653589793};
    std::vector<int> final_sinc_sizes{7, 9, 11, 13, 15, 17, 19, 21};
    ResizeWeights final_resize_weights{0.0, 1.0, 1.0, 1.0};
    int output_scale = 4;

    /// Library defaults: strong first stage, weaker second stage.
    static DegradationConfig defaults();

    /// Throws ConfigError describing the first invalid field.
    void validate() const;

    /// Overrides defaults from `[stage1]`, `[stage2]` and `[final]` sections.
    static DegradationConfig from_ini(const IniConfig& ini);
};

// ---- sampled parameters ----------------------------------------------------

struct BlurRecord {
    bool applied = false;
    KernelFamily family = KernelFamily::isotropic;
    int size = 0;
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    double theta = 0.0;
    double cutoff = 0.0;
    friend bool operator==(const BlurRecord&, const BlurRecord&) = default;
};

struct ResizeRecord {
    bool applied = false;
    ResizeMethod method = ResizeMethod::bilinear;
    int out_h = 0;
    int out_w = 0;
    friend bool operator==(const ResizeRecord&, const ResizeRecord&) = default;
};

struct NoiseRecord {
    bool applied = false;
    NoiseKind kind = NoiseKind::gaussian;
    /// Gaussian sigma in 8-bit levels, or Poisson scale.
    double strength = 0.0;
    bool gray = false;
    std::uint64_t seed = 0;
    friend bool operator==(const NoiseRecord&, const NoiseRecord&) = default;
};

struct JpegRecord {
    bool applied = false;
    int quality = 0;
    friend bool operator==(const JpegRecord&, const JpegRecord&) = default;
};

struct StageRecord {
    BlurRecord blur;
    ResizeRecord resize;
    NoiseRecord noise;
    JpegRecord jpeg;
    friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

/// Everything `degrade` sampled. Replaying it reproduces the output exactly.
struct DegradationRecord {
    StageRecord stage1;
    /// stage2.jpeg is the final JPEG step.
    StageRecord stage2;
    ResizeRecord final_resize;
    BlurRecord final_sinc;
    /// Final step order: JPEG, then resize + sinc (true) or the reverse.
    bool jpeg_first = false;
    friend bool operator==(const DegradationRecord&, const DegradationRecord&) = default;

    /// Single-line `key=value` text form; doubles use 17 significant digits.
    [[nodiscard]] std::string to_line() const;
    static DegradationRecord parse_line(const std::string& line);
};

struct DegradeResult {
    TensorF image;
    DegradationRecord record;
};

/// Samples a degradation for one image with `rng` and applies it.
/// Order: stage1 (blur, resize, noise, JPEG), stage2 (blur, resize, noise),
/// then the final block. Output is (H / output_scale) x (W / output_scale)
/// and lies in [0, 1].
DegradeResult degrade(const TensorF& hr, const DegradationConfig& config, SeededRng& rng);

/// Samples parameters only, tracking image size through the pipeline.
DegradationRecord sample_degradation(int height, int width, const DegradationConfig& config,
                                     SeededRng& rng);

/// Applies a recorded degradation without sampling anything.
TensorF replay_degradation(const TensorF& hr, const DegradationRecord& record);

}  // namespace srforge
