#include "srforge/protocol.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>

#include "srforge/blur.hpp"
#include "srforge/image_io.hpp"
#include "srforge/metrics.hpp"
#include "srforge/parallel.hpp"
#include "srforge/training.hpp"

namespace srforge {

namespace fs = std::filesystem;

void EvalProtocol::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("eval protocol: " + msg); };
    if (down_factor < 1) fail("down_factor must be >= 1");
    if (upscale != down_factor) fail("upscale must equal down_factor");
    if (!(blur_sigma >= 0.0)) fail("blur_sigma must be >= 0");
    if (blur_kernel_size < 1 || blur_kernel_size % 2 == 0) fail("blur_kernel_size must be a positive odd integer");
    if (gt_resize && (gt_resize->height < 1 || gt_resize->width < 1)) fail("gt_resize dimensions must be positive");
}

EvalProtocol EvalProtocol::from_ini(const IniConfig& ini, EvalProtocol p) {
    const std::string s = "eval";
    p.down_factor = ini.get_int(s, "down_factor", p.down_factor);
    p.upscale = ini.get_int(s, "upscale", p.down_factor);
    p.down_method = parse_resize_method(ini.get_string(s, "down_method", std::string(to_string(p.down_method))));
    p.blur_sigma = ini.get_double(s, "blur_sigma", p.blur_sigma);
    p.blur_kernel_size = ini.get_int(s, "blur_kernel_size", p.blur_kernel_size);
    if (ini.raw(s, "gt_resize")) {
        const auto dims = ini.get_int_list(s, "gt_resize", {});
        if (dims.empty()) {
            p.gt_resize.reset();
        } else if (dims.size() == 2) {
            p.gt_resize = GtResize{dims[0], dims[1], p.gt_resize ? p.gt_resize->method : ResizeMethod::lanczos};
        } else {
            throw ConfigError("eval protocol: gt_resize takes 'height, width' or nothing");
        }
    }
    if (p.gt_resize) {
        p.gt_resize->method =
            parse_resize_method(ini.get_string(s, "gt_resize_method", std::string(to_string(p.gt_resize->method))));
    }
    for (const std::string& key : ini.unused_keys()) {
        if (key.rfind(s + ".", 0) == 0) throw ConfigError("eval protocol: unknown key " + key);
    }
    p.validate();
    return p;
}

EvalProtocol drive_protocol() {
    EvalProtocol p;
    p.name = "drive";
    p.gt_resize = GtResize{512, 512, ResizeMethod::lanczos};
    p.down_factor = 2;
    p.upscale = 2;
    return p;
}

EvalProtocol nih_protocol() {
    EvalProtocol p;
    p.name = "nih";
    p.down_factor = 4;
    p.upscale = 4;
    return p;
}

EvalProtocol protocol_by_name(const std::string& name) {
    if (name == "drive") return drive_protocol();
    if (name == "nih") return nih_protocol();
    if (name == "custom") return EvalProtocol{};
    throw ConfigError("unknown protocol '" + name + "' (expected drive, nih or custom)");
}

namespace {

TensorF quantize(const TensorF& img) {
    TensorF out(img.shape());
    for (std::size_t i = 0; i < img.numel(); ++i) {
        out[i] = static_cast<float>(std::round(std::clamp(static_cast<double>(img[i]), 0.0, 1.0) * 255.0) / 255.0);
    }
    return out;
}

TensorF crop_to(const TensorF& img, int h, int w) {
    const Shape s = img.shape();
    if (s.h == h && s.w == w) return img;
    TensorF out({s.n, s.c, h, w});
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            for (int y = 0; y < h; ++y) {
                std::copy_n(img.plane(n, c) + static_cast<std::size_t>(y) * s.w, w,
                            out.plane(n, c) + static_cast<std::size_t>(y) * w);
            }
        }
    }
    return out;
}

}  // namespace

ProtocolPair apply_protocol(const TensorF& image, const EvalProtocol& protocol) {
    protocol.validate();
    TensorF gt = image;
    if (protocol.gt_resize) gt = resize(gt, protocol.gt_resize->height, protocol.gt_resize->width, protocol.gt_resize->method);
    const int f = protocol.down_factor;
    const int lh = gt.h() / f;
    const int lw = gt.w() / f;
    if (lh < 1 || lw < 1) throw ShapeError("protocol: image " + gt.shape().str() + " too small for factor " + std::to_string(f));
    gt = quantize(crop_to(gt, lh * f, lw * f));
    TensorF lr = resize(gt, lh, lw, protocol.down_method);
    if (protocol.blur_sigma > 0.0) {
        lr = apply_blur(lr, gen_gaussian_kernel(protocol.blur_kernel_size, protocol.blur_sigma, protocol.blur_sigma, 0.0));
    }
    return {gt, quantize(lr)};
}

Upscaler bicubic_upscaler(int factor) {
    return [factor](const TensorF& lr) { return resize(lr, lr.h() * factor, lr.w() * factor, ResizeMethod::bicubic); };
}

Upscaler checkpoint_upscaler(const fs::path& checkpoint, int* scale_out) {
    auto gen = std::make_shared<Generator<float>>(load_inference_generator(load_checkpoint(checkpoint)));
    if (scale_out != nullptr) *scale_out = gen->config().scale;
    return [gen](const TensorF& lr) { return gen->forward(Var<float>::borrowed(lr)).value(); };
}

EvalReport run_protocol(const Upscaler& upscaler, const std::string& model_label, const fs::path& gt_dir,
                        const EvalProtocol& protocol, std::optional<int> threads) {
    protocol.validate();
    EvalReport report;
    report.model = model_label;
    report.protocol = protocol;
    const auto files = list_images(gt_dir);
    struct Slot {
        std::optional<ImageScore> score;
        std::string error;
    };
    std::vector<Slot> slots(files.size());
    parallel_for(files.size(), resolve_threads(threads), [&](std::size_t i) {
        const std::string name = files[i].filename().string();
        TensorF image;
        try {
            image = read_image(files[i]);
        } catch (const std::exception& e) {
            slots[i].error = e.what();
            return;
        }
        const ProtocolPair pair = apply_protocol(image, protocol);
        const TensorF sr = upscaler(pair.lr);
        if (!(sr.shape() == pair.gt.shape())) {
            throw ShapeError("evaluate: " + name + ": model output " + sr.shape().str() + " does not match ground truth " +
                             pair.gt.shape().str());
        }
        const TensorD a = to_levels(sr);
        const TensorD b = to_levels(pair.gt);
        slots[i].score = ImageScore{name, psnr(a, b), ssim(a, b)};
    });
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (slots[i].score) {
            report.per_image.push_back(*slots[i].score);
        } else {
            spdlog::warn("skipping {}", slots[i].error);
            report.skipped.push_back(files[i].filename().string());
        }
    }
    if (report.per_image.empty()) throw std::runtime_error("evaluate: no readable images in " + gt_dir.string());
    double p = 0.0, s = 0.0;
    for (const auto& r : report.per_image) {
        p += r.psnr;
        s += r.ssim;
    }
    const auto n = static_cast<double>(report.per_image.size());
    report.mean_psnr = p / n;
    report.mean_ssim = s / n;
    return report;
}

EvalReport run_protocol(const fs::path& checkpoint, const fs::path& gt_dir, const EvalProtocol& protocol,
                        std::optional<int> threads) {
    int scale = 0;
    const Upscaler up = checkpoint_upscaler(checkpoint, &scale);
    if (scale != protocol.upscale) {
        throw ConfigError("checkpoint generator scale " + std::to_string(scale) + " does not match protocol upscale " +
                          std::to_string(protocol.upscale));
    }
    return run_protocol(up, checkpoint.string(), gt_dir, protocol, threads);
}

std::string format_metric(double value, int precision) {
    if (std::isinf(value) && value > 0) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    return buf;
}

std::string format_report(const EvalReport& r) {
    const EvalProtocol& p = r.protocol;
    std::string out;
    auto line = [&out](const std::string& text) { out += text + "\n"; };
    line("# protocol\t" + p.name);
    line("# checkpoint\t" + r.model);
    line("# gt resize\t" + (p.gt_resize ? std::to_string(p.gt_resize->height) + "x" + std::to_string(p.gt_resize->width) +
                                              " " + std::string(to_string(p.gt_resize->method))
                                        : std::string("none")));
    line("# downsample\tx" + std::to_string(p.down_factor) + " " + std::string(to_string(p.down_method)));
    line("# blur sigma\t" + format_metric(p.blur_sigma, 3));
    line("# blur kernel\t" + std::to_string(p.blur_kernel_size));
    line("# upscale\tx" + std::to_string(p.upscale));
    line("# metrics\tpsnr dB (peak 255), ssim on luma");
    line("# images\t" + std::to_string(r.per_image.size()));
    if (!r.skipped.empty()) {
        std::string list;
        for (const auto& s : r.skipped) list += (list.empty() ? "" : ", ") + s;
        line("# skipped\t" + list);
    }
    line("name\tpsnr\tssim");
    for (const auto& s : r.per_image) line(s.name + "\t" + format_metric(s.psnr, 4) + "\t" + format_metric(s.ssim, 6));
    line("MEAN\t" + format_metric(r.mean_psnr, 4) + "\t" + format_metric(r.mean_ssim, 6));
    line("# model\tPSNR / SSIM");
    line("# " + r.model + "\t" + format_metric(r.mean_psnr, 2) + " / " + format_metric(r.mean_ssim, 4));
    return out;
}

}  // namespace srforge
