#include "srforge/degradation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "srforge/jpeg.hpp"
#include "srforge/noise.hpp"

namespace srforge {

namespace {

constexpr std::array<ResizeMethod, 4> kResizeMethods = {ResizeMethod::nearest, ResizeMethod::bilinear,
                                                        ResizeMethod::bicubic, ResizeMethod::area};

}  // namespace

DegradationConfig DegradationConfig::defaults() {
    DegradationConfig cfg;
    cfg.stage1.noise.gaussian_sigma = {0.0, 30.0};
    cfg.stage2.blur.skip_prob = 0.2;
    cfg.stage2.blur.sigma = {0.2, 1.5};
    cfg.stage2.resize.scale = {0.3, 1.2};
    cfg.stage2.noise.gaussian_sigma = {0.0, 25.0};
    cfg.stage2.noise.poisson_scale = {0.05, 2.5};
    return cfg;
}

namespace {

void check(bool ok, const std::string& message) {
    if (!ok) throw ConfigError("degradation config: " + message);
}

void check_prob(double p, const std::string& what) {
    check(p >= 0.0 && p <= 1.0, what + " must be a probability in [0, 1]");
}

void check_range(const Range& r, const std::string& what) {
    check(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi, what + " must satisfy lo <= hi");
}

template <std::size_t N>
void check_weights(const std::array<double, N>& w, const std::string& what) {
    double total = 0.0;
    for (double v : w) {
        check(v >= 0.0, what + " weights must be non-negative");
        total += v;
    }
    check(total > 0.0, what + " weights must not all be zero");
}

void validate_stage(const DegradationStageConfig& s, const std::string& name) {
    check_prob(s.blur.skip_prob, name + ".blur_skip_prob");
    check_weights(s.blur.family_weights, name + ".kernel");
    check(!s.blur.kernel_sizes.empty(), name + ".kernel_sizes must not be empty");
    for (int k : s.blur.kernel_sizes) {
        check(k % 2 == 1 && k >= 7 && k <= 21, name + ".kernel_sizes entries must be odd in [7, 21]");
    }
    check_range(s.blur.sigma, name + ".blur_sigma");
    check(s.blur.sigma.lo > 0.0, name + ".blur_sigma must be positive");
    check_range(s.blur.rotation, name + ".blur_rotation");
    check_range(s.blur.sinc_cutoff, name + ".sinc_cutoff");
    check(s.blur.sinc_cutoff.lo > 0.0 && s.blur.sinc_cutoff.hi <= std::numbers::pi,
          name + ".sinc_cutoff must lie in (0, pi]");
    check_prob(s.resize.skip_prob, name + ".resize_skip_prob");
    check_range(s.resize.scale, name + ".resize_scale");
    check(s.resize.scale.lo > 0.0, name + ".resize_scale must be positive");
    check_weights(s.resize.method_weights, name + ".resize");
    check_prob(s.noise.skip_prob, name + ".noise_skip_prob");
    check_weights(s.noise.kind_weights, name + ".noise");
    check_range(s.noise.gaussian_sigma, name + ".gaussian_sigma");
    check(s.noise.gaussian_sigma.lo >= 0.0, name + ".gaussian_sigma must be non-negative");
    check_range(s.noise.poisson_scale, name + ".poisson_scale");
    check(s.noise.poisson_scale.lo > 0.0, name + ".poisson_scale must be positive");
    check_prob(s.noise.gray_prob, name + ".gray_noise_prob");
    check_prob(s.jpeg.skip_prob, name + ".jpeg_skip_prob");
    check(s.jpeg.quality_lo >= 1 && s.jpeg.quality_hi <= 100 && s.jpeg.quality_lo <= s.jpeg.quality_hi,
          name + ".jpeg_quality must satisfy 1 <= lo <= hi <= 100");
}

}  // namespace

void DegradationConfig::validate() const {
    validate_stage(stage1, "stage1");
    validate_stage(stage2, "stage2");
    check_prob(final_sinc_probability, "final.sinc_prob");
    check_range(final_sinc_cutoff, "final.sinc_cutoff");
    check(final_sinc_cutoff.lo > 0.0 && final_sinc_cutoff.hi <= std::numbers::pi,
          "final.sinc_cutoff must lie in (0, pi]");
    check(!final_sinc_sizes.empty(), "final.sinc_kernel_sizes must not be empty");
    for (int k : final_sinc_sizes) {
        check(k % 2 == 1 && k >= 7 && k <= 21, "final.sinc_kernel_sizes entries must be odd in [7, 21]");
    }
    check_weights(final_resize_weights, "final.resize");
    check(output_scale == 1 || output_scale == 2 || output_scale == 4, "final.output_scale must be 1, 2 or 4");
}

namespace {

Range read_range(const IniConfig& ini, const std::string& s, const std::string& k, Range fallback) {
    const auto [lo, hi] = ini.get_range(s, k, {fallback.lo, fallback.hi});
    return {lo, hi};
}

ResizeWeights read_resize_weights(const IniConfig& ini, const std::string& s, ResizeWeights w) {
    w[0] = ini.get_double(s, "resize_nearest_weight", w[0]);
    w[1] = ini.get_double(s, "resize_bilinear_weight", w[1]);
    w[2] = ini.get_double(s, "resize_bicubic_weight", w[2]);
    w[3] = ini.get_double(s, "resize_area_weight", w[3]);
    return w;
}

void read_stage(const IniConfig& ini, const std::string& s, DegradationStageConfig& st) {
    st.blur.skip_prob = ini.get_double(s, "blur_skip_prob", st.blur.skip_prob);
    st.blur.family_weights[0] = ini.get_double(s, "kernel_iso_weight", st.blur.family_weights[0]);
    st.blur.family_weights[1] = ini.get_double(s, "kernel_aniso_weight", st.blur.family_weights[1]);
    st.blur.family_weights[2] = ini.get_double(s, "kernel_sinc_weight", st.blur.family_weights[2]);
    st.blur.kernel_sizes = ini.get_int_list(s, "kernel_sizes", st.blur.kernel_sizes);
    st.blur.sigma = read_range(ini, s, "blur_sigma", st.blur.sigma);
    st.blur.rotation = read_range(ini, s, "blur_rotation", st.blur.rotation);
    st.blur.sinc_cutoff = read_range(ini, s, "sinc_cutoff", st.blur.sinc_cutoff);
    st.resize.skip_prob = ini.get_double(s, "resize_skip_prob", st.resize.skip_prob);
    st.resize.scale = read_range(ini, s, "resize_scale", st.resize.scale);
    st.resize.method_weights = read_resize_weights(ini, s, st.resize.method_weights);
    st.noise.skip_prob = ini.get_double(s, "noise_skip_prob", st.noise.skip_prob);
    st.noise.kind_weights[0] = ini.get_double(s, "noise_gaussian_weight", st.noise.kind_weights[0]);
    st.noise.kind_weights[1] = ini.get_double(s, "noise_poisson_weight", st.noise.kind_weights[1]);
    st.noise.gaussian_sigma = read_range(ini, s, "gaussian_sigma", st.noise.gaussian_sigma);
    st.noise.poisson_scale = read_range(ini, s, "poisson_scale", st.noise.poisson_scale);
    st.noise.gray_prob = ini.get_double(s, "gray_noise_prob", st.noise.gray_prob);
    st.jpeg.skip_prob = ini.get_double(s, "jpeg_skip_prob", st.jpeg.skip_prob);
    const auto q = ini.get_range(s, "jpeg_quality", {st.jpeg.quality_lo, st.jpeg.quality_hi});
    st.jpeg.quality_lo = static_cast<int>(q.first);
    st.jpeg.quality_hi = static_cast<int>(q.second);
}

}  // namespace

DegradationConfig DegradationConfig::from_ini(const IniConfig& ini) {
    DegradationConfig cfg = defaults();
    read_stage(ini, "stage1", cfg.stage1);
    read_stage(ini, "stage2", cfg.stage2);
    cfg.final_sinc_probability = ini.get_double("final", "sinc_prob", cfg.final_sinc_probability);
    cfg.final_sinc_cutoff = read_range(ini, "final", "sinc_cutoff", cfg.final_sinc_cutoff);
    cfg.final_sinc_sizes = ini.get_int_list("final", "sinc_kernel_sizes", cfg.final_sinc_sizes);
    cfg.final_resize_weights = read_resize_weights(ini, "final", cfg.final_resize_weights);
    cfg.output_scale = ini.get_int("final", "output_scale", cfg.output_scale);
    for (const std::string& key : ini.unused_keys()) {
        const std::string section = key.substr(0, key.find('.'));
        if (section == "stage1" || section == "stage2" || section == "final") {
            throw ConfigError("degradation config: unknown key " + key);
        }
    }
    cfg.validate();
    return cfg;
}

// ---- sampling ----------------------------------------------------------------

namespace {

int pick_size(const std::vector<int>& sizes, SeededRng& rng) {
    return sizes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(sizes.size()) - 1))];
}

/// Largest odd kernel whose radius fits inside an h x w image.
int max_kernel(int h, int w) { return 2 * (std::min(h, w) - 1) + 1; }

BlurRecord sample_blur(const BlurStageConfig& c, int h, int w, SeededRng& rng) {
    BlurRecord r;
    if (rng.bernoulli(c.skip_prob)) return r;
    r.family = static_cast<KernelFamily>(rng.choose(c.family_weights));
    r.size = std::min(pick_size(c.kernel_sizes, rng), max_kernel(h, w));
    switch (r.family) {
        case KernelFamily::isotropic:
            r.sigma_x = r.sigma_y = rng.uniform(c.sigma.lo, c.sigma.hi);
            break;
        case KernelFamily::anisotropic:
            r.sigma_x = rng.uniform(c.sigma.lo, c.sigma.hi);
            r.sigma_y = rng.uniform(c.sigma.lo, c.sigma.hi);
            r.theta = rng.uniform(c.rotation.lo, c.rotation.hi);
            break;
        case KernelFamily::sinc:
            r.cutoff = rng.uniform(c.sinc_cutoff.lo, c.sinc_cutoff.hi);
            break;
    }
    r.applied = r.size >= (r.family == KernelFamily::sinc ? 7 : 3);
    return r.applied ? r : BlurRecord{};
}

ResizeRecord sample_resize(const ResizeStageConfig& c, int h, int w, SeededRng& rng) {
    ResizeRecord r;
    if (rng.bernoulli(c.skip_prob)) return r;
    const double s = rng.uniform(c.scale.lo, c.scale.hi);
    r.method = kResizeMethods[rng.choose(c.method_weights)];
    r.out_h = scaled_dim(h, s);
    r.out_w = scaled_dim(w, s);
    r.applied = true;
    return r;
}

NoiseRecord sample_noise(const NoiseStageConfig& c, SeededRng& rng) {
    NoiseRecord r;
    if (rng.bernoulli(c.skip_prob)) return r;
    r.kind = static_cast<NoiseKind>(rng.choose(c.kind_weights));
    const Range& range = r.kind == NoiseKind::gaussian ? c.gaussian_sigma : c.poisson_scale;
    r.strength = rng.uniform(range.lo, range.hi);
    r.gray = rng.bernoulli(c.gray_prob);
    r.seed = rng.next_u64();
    r.applied = true;
    return r;
}

JpegRecord sample_jpeg(const JpegStageConfig& c, SeededRng& rng) {
    JpegRecord r;
    if (rng.bernoulli(c.skip_prob)) return r;
    r.quality = rng.uniform_int(c.quality_lo, c.quality_hi);
    r.applied = true;
    return r;
}

}  // namespace

DegradationRecord sample_degradation(int height, int width, const DegradationConfig& config,
                                     SeededRng& rng) {
    if (height % config.output_scale != 0 || width % config.output_scale != 0) {
        throw std::invalid_argument("degrade: image size " + std::to_string(height) + "x" +
                                    std::to_string(width) + " is not divisible by output scale " +
                                    std::to_string(config.output_scale));
    }
    DegradationRecord rec;
    int h = height;
    int w = width;
    auto stage = [&](const DegradationStageConfig& c, StageRecord& out) {
        out.blur = sample_blur(c.blur, h, w, rng);
        out.resize = sample_resize(c.resize, h, w, rng);
        if (out.resize.applied) {
            h = out.resize.out_h;
            w = out.resize.out_w;
        }
        out.noise = sample_noise(c.noise, rng);
        out.jpeg = sample_jpeg(c.jpeg, rng);
    };
    stage(config.stage1, rec.stage1);
    stage(config.stage2, rec.stage2);

    rec.final_resize.applied = true;
    rec.final_resize.method = kResizeMethods[rng.choose(config.final_resize_weights)];
    rec.final_resize.out_h = height / config.output_scale;
    rec.final_resize.out_w = width / config.output_scale;
    if (rng.bernoulli(config.final_sinc_probability)) {
        BlurRecord& s = rec.final_sinc;
        s.family = KernelFamily::sinc;
        s.size = std::min(pick_size(config.final_sinc_sizes, rng),
                          max_kernel(rec.final_resize.out_h, rec.final_resize.out_w));
        s.cutoff = rng.uniform(config.final_sinc_cutoff.lo, config.final_sinc_cutoff.hi);
        s.applied = s.size >= 7;
        if (!s.applied) s = BlurRecord{};
    }
    rec.jpeg_first = rng.bernoulli(0.5);
    return rec;
}

// ---- replay ------------------------------------------------------------------

namespace {

BlurKernel kernel_for(const BlurRecord& r) {
    if (r.family == KernelFamily::sinc) return gen_sinc_kernel(r.size, r.cutoff);
    return gen_gaussian_kernel(r.size, r.sigma_x, r.sigma_y, r.theta);
}

TensorF run_blur(const TensorF& img, const BlurRecord& r) {
    if (!r.applied) return img;
    TensorF out = apply_blur(img, kernel_for(r));
    clamp01(out);
    return out;
}

TensorF run_resize(const TensorF& img, const ResizeRecord& r) {
    if (!r.applied) return img;
    return resize(img, r.out_h, r.out_w, r.method);
}

TensorF run_noise(const TensorF& img, const NoiseRecord& r) {
    if (!r.applied) return img;
    SeededRng rng(r.seed);
    if (r.kind == NoiseKind::gaussian) return add_gaussian_noise(img, r.strength / 255.0, r.gray, rng);
    return add_poisson_noise(img, r.strength, r.gray, rng);
}

TensorF run_jpeg(const TensorF& img, const JpegRecord& r) {
    if (!r.applied) return img;
    return jpeg_roundtrip(img, r.quality);
}

}  // namespace

TensorF replay_degradation(const TensorF& hr, const DegradationRecord& rec) {
    TensorF img = run_blur(hr, rec.stage1.blur);
    img = run_resize(img, rec.stage1.resize);
    img = run_noise(img, rec.stage1.noise);
    img = run_jpeg(img, rec.stage1.jpeg);

    img = run_blur(img, rec.stage2.blur);
    img = run_resize(img, rec.stage2.resize);
    img = run_noise(img, rec.stage2.noise);

    if (rec.jpeg_first) {
        img = run_jpeg(img, rec.stage2.jpeg);
        img = run_resize(img, rec.final_resize);
        img = run_blur(img, rec.final_sinc);
    } else {
        img = run_resize(img, rec.final_resize);
        img = run_blur(img, rec.final_sinc);
        img = run_jpeg(img, rec.stage2.jpeg);
    }
    clamp01(img);
    return img;
}

DegradeResult degrade(const TensorF& hr, const DegradationConfig& config, SeededRng& rng) {
    const Shape s = hr.shape();
    if (s.n != 1) throw std::invalid_argument("degrade: expects a single image (N = 1)");
    DegradationRecord rec = sample_degradation(s.h, s.w, config, rng);
    return {replay_degradation(hr, rec), rec};
}

// ---- text form -----------------------------------------------------------------

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string_view family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::isotropic: return "iso";
        case KernelFamily::anisotropic: return "aniso";
        case KernelFamily::sinc: return "sinc";
    }
    return "?";
}

KernelFamily parse_family(const std::string& s) {
    if (s == "iso") return KernelFamily::isotropic;
    if (s == "aniso") return KernelFamily::anisotropic;
    if (s == "sinc") return KernelFamily::sinc;
    throw std::invalid_argument("record: unknown kernel family '" + s + "'");
}

std::string blur_text(const BlurRecord& r) {
    if (!r.applied) return "none";
    return std::string(family_name(r.family)) + "," + std::to_string(r.size) + "," + num(r.sigma_x) +
           "," + num(r.sigma_y) + "," + num(r.theta) + "," + num(r.cutoff);
}

std::string resize_text(const ResizeRecord& r) {
    if (!r.applied) return "none";
    return std::string(to_string(r.method)) + "," + std::to_string(r.out_h) + "," + std::to_string(r.out_w);
}

std::string noise_text(const NoiseRecord& r) {
    if (!r.applied) return "none";
    return std::string(r.kind == NoiseKind::gaussian ? "gaussian" : "poisson") + "," + num(r.strength) +
           "," + (r.gray ? "gray" : "color") + "," + std::to_string(r.seed);
}

std::string jpeg_text(const JpegRecord& r) { return r.applied ? std::to_string(r.quality) : "none"; }

std::vector<std::string> fields(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

void expect_fields(const std::vector<std::string>& f, std::size_t n, const std::string& key) {
    if (f.size() != n) throw std::invalid_argument("record: malformed value for '" + key + "'");
}

BlurRecord parse_blur(const std::string& v, const std::string& key) {
    BlurRecord r;
    if (v == "none") return r;
    const auto f = fields(v);
    expect_fields(f, 6, key);
    r.applied = true;
    r.family = parse_family(f[0]);
    r.size = std::stoi(f[1]);
    r.sigma_x = std::stod(f[2]);
    r.sigma_y = std::stod(f[3]);
    r.theta = std::stod(f[4]);
    r.cutoff = std::stod(f[5]);
    return r;
}

ResizeRecord parse_resize(const std::string& v, const std::string& key) {
    ResizeRecord r;
    if (v == "none") return r;
    const auto f = fields(v);
    expect_fields(f, 3, key);
    r.applied = true;
    r.method = parse_resize_method(f[0]);
    r.out_h = std::stoi(f[1]);
    r.out_w = std::stoi(f[2]);
    return r;
}

NoiseRecord parse_noise(const std::string& v, const std::string& key) {
    NoiseRecord r;
    if (v == "none") return r;
    const auto f = fields(v);
    expect_fields(f, 4, key);
    r.applied = true;
    if (f[0] == "gaussian") {
        r.kind = NoiseKind::gaussian;
    } else if (f[0] == "poisson") {
        r.kind = NoiseKind::poisson;
    } else {
        throw std::invalid_argument("record: unknown noise kind '" + f[0] + "'");
    }
    r.strength = std::stod(f[1]);
    r.gray = f[2] == "gray";
    r.seed = std::stoull(f[3]);
    return r;
}

JpegRecord parse_jpeg(const std::string& v) {
    JpegRecord r;
    if (v == "none") return r;
    r.applied = true;
    r.quality = std::stoi(v);
    return r;
}

}  // namespace

std::string DegradationRecord::to_line() const {
    std::string out;
    auto put = [&out](const std::string& k, const std::string& v) {
        if (!out.empty()) out += ' ';
        out += k + "=" + v;
    };
    for (int i = 0; i < 2; ++i) {
        const StageRecord& s = i == 0 ? stage1 : stage2;
        const std::string p = i == 0 ? "s1." : "s2.";
        put(p + "blur", blur_text(s.blur));
        put(p + "resize", resize_text(s.resize));
        put(p + "noise", noise_text(s.noise));
        put(p + "jpeg", jpeg_text(s.jpeg));
    }
    put("final.resize", resize_text(final_resize));
    put("final.sinc", blur_text(final_sinc));
    put("final.order", jpeg_first ? "jpeg_first" : "resize_first");
    return out;
}

DegradationRecord DegradationRecord::parse_line(const std::string& line) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(line);
    std::string token;
    while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("record: token without '=': " + token);
        kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    auto get = [&kv](const std::string& k) {
        const auto it = kv.find(k);
        if (it == kv.end()) throw std::invalid_argument("record: missing key '" + k + "'");
        return it->second;
    };
    DegradationRecord r;
    for (int i = 0; i < 2; ++i) {
        StageRecord& s = i == 0 ? r.stage1 : r.stage2;
        const std::string p = i == 0 ? "s1." : "s2.";
        s.blur = parse_blur(get(p + "blur"), p + "blur");
        s.resize = parse_resize(get(p + "resize"), p + "resize");
        s.noise = parse_noise(get(p + "noise"), p + "noise");
        s.jpeg = parse_jpeg(get(p + "jpeg"));
    }
    r.final_resize = parse_resize(get("final.resize"), "final.resize");
    r.final_sinc = parse_blur(get("final.sinc"), "final.sinc");
    const std::string order = get("final.order");
    if (order != "jpeg_first" && order != "resize_first") {
        throw std::invalid_argument("record: unknown final.order '" + order + "'");
    }
    r.jpeg_first = order == "jpeg_first";
    return r;
}

}  // namespace srforge
