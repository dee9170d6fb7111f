#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srforge/config.hpp"
#include "srforge/resize.hpp"
#include "srforge/tensor.hpp"

namespace srforge {

struct GtResize {
    int height = 0;
    int width = 0;
    ResizeMethod method = ResizeMethod::lanczos;
};

/// Fixed evaluation degradation: optional GT resize, downsample by
/// down_factor, then Gaussian blur of the LR image.
struct EvalProtocol {
    std::string name = "custom";
    std::optional<GtResize> gt_resize;
    int down_factor = 2;
    ResizeMethod down_method = ResizeMethod::bicubic;
    double blur_sigma = 1.0;
    int blur_kernel_size = 7;
    int upscale = 2;

    void validate() const;

    /// Overrides fields from the `[eval]` section.
    static EvalProtocol from_ini(const IniConfig& ini, EvalProtocol base);
};

/// GT resized to 512x512 (Lanczos), bicubic x2 down, blur, x2 up.
EvalProtocol drive_protocol();
/// Bicubic x4 down, blur, x4 up.
EvalProtocol nih_protocol();
EvalProtocol protocol_by_name(const std::string& name);

struct ProtocolPair {
    TensorF gt;
    TensorF lr;
};

/// Builds GT and LR for one image, both quantized to 8-bit levels. When the
/// GT is not divisible by down_factor its bottom and right edges are cropped.
ProtocolPair apply_protocol(const TensorF& image, const EvalProtocol& protocol);

/// Maps an LR image to an SR image `upscale` times larger. Called
/// concurrently from evaluation workers.
using Upscaler = std::function<TensorF(const TensorF& lr)>;

/// Bicubic interpolation baseline.
Upscaler bicubic_upscaler(int factor);

/// Generator from a checkpoint (EMA weights when present).
Upscaler checkpoint_upscaler(const std::filesystem::path& checkpoint, int* scale_out = nullptr);

struct ImageScore {
    std::string name;
    double psnr = 0.0;
    double ssim = 0.0;
};

struct EvalReport {
    std::string model;
    EvalProtocol protocol;
    std::vector<ImageScore> per_image;
    std::vector<std::string> skipped;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
};

/// Scores `upscaler` on every PNG in `gt_dir` in name order. PSNR and SSIM
/// use the [0, 255] scale on 8-bit rounded outputs. Unreadable images are
/// skipped and listed; a directory without usable images is an error.
EvalReport run_protocol(const Upscaler& upscaler, const std::string& model_label, const std::filesystem::path& gt_dir,
                        const EvalProtocol& protocol, std::optional<int> threads = std::nullopt);

/// Loads the generator from `checkpoint` and checks its scale.
EvalReport run_protocol(const std::filesystem::path& checkpoint, const std::filesystem::path& gt_dir,
                        const EvalProtocol& protocol, std::optional<int> threads = std::nullopt);

/// Header lines starting with '#', a `name\tpsnr\tssim` column line, one line
/// per image, a MEAN line, then the summary row in "PSNR / SSIM" form.
std::string format_report(const EvalReport& report);

/// "inf" for +infinity, fixed precision otherwise.
std::string format_metric(double value, int precision);

}  // namespace srforge
