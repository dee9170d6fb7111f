// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "gradcheck.hpp"
#include "metric_oracles.hpp"
#include "srforge/blur.hpp"
#include "srforge/cli.hpp"
#include "srforge/dataset.hpp"
#include "srforge/degradation.hpp"
#include "srforge/image_io.hpp"
#include "srforge/jpeg.hpp"
#include "srforge/metrics.hpp"
#include "srforge/protocol.hpp"
#include "srforge/training.hpp"
#include "synthetic.hpp"
#include "tempdir.hpp"

using namespace srforge;
using namespace srforge::testing;

namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    /// Records a sub-check; the criterion fails if any sub-check fails.
    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1, 2: parameter counts -------------------------------------------------

Outcome generator_count() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = count_params(Generator<float>(GeneratorConfig{}, 0));
    const double t = seconds_since(t0);
    o.expect(n == 16'697'987, "count " + std::to_string(n) + " != 16697987");
    o.note("count " + std::to_string(n));
    o.expect(t < 1.0, "runtime " + fmt("%.2f s", t) + " >= 1 s");
    return o;
}

Outcome discriminator_count() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = count_params(Discriminator<float>(DiscriminatorConfig{}, 0));
    const double t = seconds_since(t0);
    o.expect(n == 4'376'897, "count " + std::to_string(n) + " != 4376897");
    o.note("count " + std::to_string(n));
    o.expect(t < 1.0, "runtime " + fmt("%.2f s", t) + " >= 1 s");
    return o;
}

// ---- 3: gradient suite ----------------------------------------------------------

Outcome gradient_suite() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    constexpr double kTol = 1e-3;
    SeededRng rng(2024);
    double worst = 0.0;
    std::string worst_name;
    auto check = [&](const std::string& name, double err) {
        o.expect(err <= kTol, name + " error " + fmt("%.2e", err));
        if (err > worst) {
            worst = err;
            worst_name = name;
        }
    };
    auto t = [&](Shape s) { return random_tensor(s, rng); };
    auto nz = [&](Shape s) { return away_from_zero(s, rng); };

    check("conv2d", max_grad_error([](const auto& v) { return conv2d(v[0], v[1], 1, 1); },
                                   {t({2, 3, 5, 6}), t({4, 3, 3, 3})}));
    check("conv2d+bias stride 2", max_grad_error([](const auto& v) { return conv2d(v[0], v[1], v[2], 2, 1); },
                                                 {t({1, 2, 8, 8}), t({3, 2, 4, 4}), t({3, 1, 1, 1})}));
    check("leaky_relu", max_grad_error([](const auto& v) { return leaky_relu(v[0]); }, {nz({1, 2, 4, 4})}));
    check("nearest_upsample", max_grad_error([](const auto& v) { return nearest_upsample(v[0], 2); }, {t({1, 2, 3, 4})}));
    check("bilinear_upsample",
          max_grad_error([](const auto& v) { return bilinear_upsample(v[0], 2); }, {t({1, 2, 3, 4})}));
    check("pixel_unshuffle", max_grad_error([](const auto& v) { return pixel_unshuffle(v[0], 2); }, {t({1, 2, 4, 6})}));
    check("pixel_shuffle", max_grad_error([](const auto& v) { return pixel_shuffle(v[0], 2); }, {t({1, 8, 2, 3})}));
    check("add", max_grad_error([](const auto& v) { return add(v[0], v[1]); }, {t({1, 2, 3, 3}), t({1, 2, 3, 3})}));
    check("sub", max_grad_error([](const auto& v) { return sub(v[0], v[1]); }, {t({1, 2, 3, 3}), t({1, 2, 3, 3})}));
    check("mul", max_grad_error([](const auto& v) { return mul(v[0], v[1]); }, {t({1, 2, 3, 3}), t({1, 2, 3, 3})}));
    check("scale", max_grad_error([](const auto& v) { return scale(v[0], -0.7); }, {t({1, 2, 3, 3})}));
    check("add_scalar", max_grad_error([](const auto& v) { return add_scalar(v[0], 0.3); }, {t({1, 2, 3, 3})}));
    check("sub_broadcast",
          max_grad_error([](const auto& v) { return sub_broadcast(v[0], v[1]); }, {t({1, 2, 3, 3}), t({1, 1, 1, 1})}));
    check("add_scaled",
          max_grad_error([](const auto& v) { return add_scaled(v[0], v[1], 0.2); }, {t({1, 2, 3, 3}), t({1, 2, 3, 3})}));
    check("concat_channels", max_grad_error([](const auto& v) { return concat_channels(std::vector{v[0], v[1], v[2]}); },
                                            {t({2, 1, 3, 3}), t({2, 3, 3, 3}), t({2, 2, 3, 3})}));
    {
        const TensorD a = t({1, 2, 4, 4});
        TensorD b = nz({1, 2, 4, 4});
        for (std::size_t i = 0; i < b.numel(); ++i) b[i] += a[i];
        check("mean_abs_diff", max_grad_error([](const auto& v) { return mean_abs_diff(v[0], v[1]); }, {a, b}));
    }
    check("mean", max_grad_error([](const auto& v) { return mean(v[0]); }, {t({2, 2, 3, 3})}));
    check("sum", max_grad_error([](const auto& v) { return sum(v[0]); }, {t({2, 2, 3, 3})}));
    check("mean_softplus", max_grad_error([](const auto& v) { return mean_softplus(scale(v[0], 8.0)); }, {t({1, 2, 3, 3})}));
    {
        const TensorD w = t({4, 3, 3, 3});
        TensorD u({4, 1, 1, 1});
        for (double& x : u.data()) x = rng.normal();
        const auto sn = spectral_normalize(w, u, 3);
        check("spectral_divide", max_grad_error(
                                     [&](const auto& v) { return spectral_divide(v[0], sn.u, sn.v); }, {w}));
    }
    check("gan_loss_g", max_grad_error([](const auto& v) { return gan_loss_g(v[0]); }, {t({2, 1, 4, 4})}));
    check("gan_loss_d",
          max_grad_error([](const auto& v) { return gan_loss_d(v[0], v[1]); }, {t({2, 1, 4, 4}), t({2, 1, 4, 4})}));
    check("relativistic_loss_g", max_grad_error([](const auto& v) { return relativistic_loss_g(v[0], v[1]); },
                                                {t({2, 1, 4, 4}), t({2, 1, 4, 4})}));
    check("relativistic_loss_d", max_grad_error([](const auto& v) { return relativistic_loss_d(v[0], v[1]); },
                                                {t({2, 1, 4, 4}), t({2, 1, 4, 4})}));
    {
        const FeatureExtractor<double> fx;
        const TensorD sr = random_tensor({1, 3, 8, 8}, rng, 0, 1);
        const TensorD hr = random_tensor({1, 3, 8, 8}, rng, 0, 1);
        Tape<double> tape;
        const Var<double> x = tape.leaf(sr);
        tape.backward(perceptual_loss(x, Var<double>::constant(hr), fx));
        const TensorD g = tape.grad(x);
        TensorD xs = sr;
        auto f = [&] { return perceptual_loss(Var<double>::constant(xs), Var<double>::constant(hr), fx).value().item(); };
        double err = 0.0;
        for (std::size_t i = 0; i < xs.numel(); ++i) err = std::max(err, rel_error(g[i], kink_aware_difference(xs[i], f, 1e-5)));
        check("perceptual_loss", err);
    }
    {
        Generator<double> gen(GeneratorConfig{3, 3, 8, 1, 4, 4, 0.2}, 11);
        SeededRng init(12);
        for (auto& p : gen.parameters()) {
            if (p.value.h() > 1) {
                kaiming_fill(p.value, 1.0, init);
            } else {
                for (double& v : p.value.data()) v = 0.1 * init.normal();
            }
        }
        const TensorD x = random_tensor({1, 3, 16, 16}, init, 0.0, 1.0);
        auto fwd = [](Generator<double>& m, Tape<double>* tape, const Var<double>& in) { return m.forward(in, tape); };
        check("toy generator (1 RRDB, 8 features, 16x16)", max_model_grad_error(gen, fwd, x, 4));
    }
    {
        Discriminator<double> disc(DiscriminatorConfig{3, 4, 1}, 13);
        const TensorD x = random_tensor({1, 3, 16, 16}, rng, 0.0, 1.0);
        auto fwd = [](Discriminator<double>& m, Tape<double>* tape, const Var<double>& in) { return m.forward(in, tape); };
        check("toy discriminator", max_model_grad_error(disc, fwd, x, 4));
    }
    const double secs = seconds_since(t0);
    o.note("max relative error " + fmt("%.2e", worst) + " (" + worst_name + ")");
    o.expect(secs < 120.0, "runtime " + fmt("%.1f s", secs) + " >= 120 s");
    return o;
}

// ---- 4: schedule --------------------------------------------------------------------

Outcome schedule() {
    Outcome o;
    const int a = plan_schedule(397, 10, 75);
    const int b = plan_schedule(3310, 10, 50);
    o.expect(a == 3000, "plan_schedule(397, 10, 75) = " + std::to_string(a));
    o.expect(b == 16550, "plan_schedule(3310, 10, 50) = " + std::to_string(b));
    const double gap = std::abs(b - 16600) / 16600.0;
    o.expect(gap < 0.01, "gap to 16600 is " + fmt("%.3f", gap));
    o.note(std::to_string(a) + ", " + std::to_string(b) + " (" + fmt("%.2f%%", 100 * gap) + " from 16600)");
    return o;
}

// ---- 5: multiscale -------------------------------------------------------------------

Outcome multiscale() {
    Outcome o;
    TempDir src("acc_ms_src"), dst("acc_ms_dst");
    write_image(synthetic_fundus(605, 700, 1), src / "drive_like.png");
    write_image(synthetic_fundus(96, 80, 2), src / "b.png");
    write_image(synthetic_fundus(51, 77, 3), src / "c.png");
    const int n = 3;
    const DatasetManifest m = prepare_multiscale(src.path(), dst.path());
    int pngs = 0;
    for (const auto& e : fs::directory_iterator(dst.path())) pngs += e.path().extension() == ".png";
    o.expect(pngs == 5 * n && m.entries.size() == 5u * n, std::to_string(pngs) + " files for " + std::to_string(n) + " images");
    for (const char* stem : {"drive_like", "b", "c"}) {
        o.expect(read_file(src / (std::string(stem) + ".png")) == read_file(dst / (std::string(stem) + "_x1.png")),
                 std::string(stem) + " scale-1 copy differs");
    }
    const Shape half = read_image(dst / "drive_like_x0.5.png").shape();
    o.expect(half.w == 350 && half.h == 303, "700x605 at 0.5 gave " + std::to_string(half.w) + "x" + std::to_string(half.h));
    o.note(std::to_string(pngs) + " files from " + std::to_string(n) + " images; 700x605 -> " + std::to_string(half.w) +
           "x" + std::to_string(half.h));
    return o;
}

// ---- 6: metrics ------------------------------------------------------------------------

Outcome metric_oracles() {
    Outcome o;
    double dp = 0.0, ds = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int h = 16 + static_cast<int>(seed % 5), w = 14 + static_cast<int>((seed * 7) % 11);
        const TensorD a = levels({1, 3, h, w}, 500 + seed);
        const TensorD b = seed % 5 == 0 ? levels({1, 3, h, w}, 600 + seed) : perturbed(a, 3.0 + 2.0 * seed, 700 + seed);
        dp = std::max(dp, std::abs(psnr(a, b) - brute_psnr(a, b, 255.0)));
        ds = std::max(ds, std::abs(ssim(a, b) - brute_ssim_rgb(a, b, 255.0)));
    }
    o.expect(dp <= 1e-6, "psnr deviation " + fmt("%.2e", dp));
    o.expect(ds <= 1e-4, "ssim deviation " + fmt("%.2e", ds));

    const double zero_db = psnr(TensorD({1, 1, 4, 4}, 0.0), TensorD({1, 1, 4, 4}, 255.0), 255.0);
    TensorD z({1, 1, 2, 2}), ten({1, 1, 2, 2});
    ten[0] = 10.0;
    const double p34 = psnr(z, ten, 255.0);
    const double s_const = ssim(TensorD({1, 1, 16, 16}, 100.0), TensorD({1, 1, 16, 16}, 110.0), 255.0);
    o.expect(std::abs(zero_db - 0.0) <= 1e-3, "0 dB example gave " + fmt("%.6f", zero_db));
    o.expect(std::abs(p34 - 34.151) <= 1e-3, "34.151 dB example gave " + fmt("%.6f", p34));
    o.expect(std::abs(s_const - 0.99548) <= 1e-3, "0.99548 SSIM example gave " + fmt("%.6f", s_const));
    o.note("20 pairs: max |psnr diff| " + fmt("%.1e", dp) + ", max |ssim diff| " + fmt("%.1e", ds) + "; examples " +
           fmt("%.4f", zero_db) + " dB, " + fmt("%.4f", p34) + " dB, " + fmt("%.5f", s_const));
    return o;
}

// ---- 7: degradation ----------------------------------------------------------------------

Outcome degradation_sanity() {
    Outcome o;
    const TensorF hr = synthetic_fundus(128, 128, 9);
    const DegradationConfig cfg = DegradationConfig::defaults();
    bool identical = true;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        SeededRng a(seed), b(seed);
        identical = identical && degrade(hr, cfg, a).image == degrade(hr, cfg, b).image;
    }
    o.expect(identical, "same seed gave different LR images");

    DegradationConfig id = cfg;
    for (auto* st : {&id.stage1, &id.stage2}) {
        st->blur.skip_prob = st->resize.skip_prob = st->noise.skip_prob = st->jpeg.skip_prob = 1.0;
    }
    id.final_sinc_probability = 0.0;
    id.output_scale = 1;
    SeededRng r(1);
    const double id_psnr = psnr(to_levels(degrade(hr, id, r).image), to_levels(hr));
    o.expect(id_psnr >= 50.0, "identity PSNR " + fmt("%.2f", id_psnr));

    TensorF step({1, 1, 32, 32});
    for (int y = 0; y < 32; ++y) {
        for (int x = 16; x < 32; ++x) step.at(0, 0, y, x) = 0.8f;
    }
    float peak = 0.0f;
    for (float v : apply_blur(step, gen_sinc_kernel(13, 3.14159265358979 / 3)).data()) peak = std::max(peak, v);
    o.expect(peak > 0.8f, "sinc step peak " + fmt("%.4f", peak));

    const double q90 = psnr(to_levels(jpeg_roundtrip(hr, 90)), to_levels(hr));
    const double q10 = psnr(to_levels(jpeg_roundtrip(hr, 10)), to_levels(hr));
    o.expect(q90 > q10, "jpeg q90 " + fmt("%.2f", q90) + " <= q10 " + fmt("%.2f", q10));
    o.note("identity PSNR " + format_metric(id_psnr, 2) + " dB; sinc overshoot peak " + fmt("%.4f", peak) +
           " on a 0.8 step; jpeg q90 " + fmt("%.2f", q90) + " dB vs q10 " + fmt("%.2f", q10) + " dB");
    return o;
}

// ---- 8: overfit ------------------------------------------------------------------------------

Outcome overfit() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    Generator<float> gen(GeneratorConfig{3, 3, 16, 2, 16, 4, 0.2}, 8);
    const TensorF hr = synthetic_fundus(128, 128, 21);
    const TensorF lr = resize(hr, 32, 32, ResizeMethod::bicubic);
    TrainConfig cfg;
    cfg.learning_rate = 1e-4;
    cfg.loss_weights = {1.0, 0.0, 0.0};
    TrainState state(gen, nullptr, cfg.ema_decay);
    const FeatureExtractor<float> fx;
    const double first = train_step(gen, nullptr, fx, lr, hr, cfg, state).l1;
    double last = first;
    for (int i = 1; i < 200; ++i) last = train_step(gen, nullptr, fx, lr, hr, cfg, state).l1;
    const double secs = seconds_since(t0);
    o.expect(last < 0.2 * first, "final L1 is " + fmt("%.1f%%", 100 * last / first) + " of the first");
    o.expect(secs < 300.0, "runtime " + fmt("%.0f s", secs));
    o.note("L1 " + fmt("%.4f", first) + " -> " + fmt("%.4f", last) + " (" + fmt("%.1f%%", 100 * last / first) +
           ") in 200 steps, " + fmt("%.1f s", secs));
    return o;
}

// ---- 9: end-to-end fine-tune -------------------------------------------------------------

/// L1 pretraining on protocol pairs, standing in for the natural-image
/// weights a fine-tune would start from.
void pretrain(Generator<float>& gen, const std::vector<TensorF>& images, const EvalProtocol& protocol, int steps) {
    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.loss_weights = {1.0, 0.0, 0.0};
    TrainState state(gen, nullptr, cfg.ema_decay);
    const FeatureExtractor<float> fx;
    for (int i = 0; i < steps; ++i) {
        SeededRng rng = SeededRng::for_item(77, static_cast<std::uint64_t>(i));
        std::vector<TensorF> hr, lr;
        for (int b = 0; b < 4; ++b) {
            const ProtocolPair pair = apply_protocol(sample_crop(images, 64, rng), protocol);
            hr.push_back(pair.gt);
            lr.push_back(pair.lr);
        }
        (void)train_step(gen, nullptr, fx, stack_batch(lr), stack_batch(hr), cfg, state);
    }
}

Outcome end_to_end() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    TempDir dir("acc_e2e");
    const fs::path data = dir / "train";
    fs::create_directories(data);
    std::vector<TensorF> images;
    for (int i = 0; i < 8; ++i) {
        write_image(synthetic_fundus(128, 128, 300 + static_cast<std::uint64_t>(i)), data / ("f" + std::to_string(i) + ".png"));
        images.push_back(read_image(data / ("f" + std::to_string(i) + ".png")));
    }
    EvalProtocol protocol;
    protocol.name = "x2";

    const GeneratorConfig gcfg{3, 3, 16, 2, 16, 2, 0.2};
    Generator<float> gen(gcfg, 5);
    pretrain(gen, images, protocol, 400);
    Checkpoint init;
    init.meta.generator = gcfg;
    export_model(gen, init);
    save_checkpoint(init, dir / "pretrained.srfg");
    const EvalReport pre = run_protocol(dir / "pretrained.srfg", data, protocol);

    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.patch_size = 64;
    cfg.total_iterations = 300;
    cfg.seed = 2025;
    cfg.save_interval = 100;
    FinetuneOptions options;
    options.degradation = DegradationConfig::defaults();
    options.degradation.output_scale = 2;
    options.discriminator = DiscriminatorConfig{3, 16, 1};
    std::ostringstream log;
    options.log = &log;
    const FinetuneSummary full = finetune(dir / "pretrained.srfg", data, cfg, options, dir / "full.srfg");

    bool finite = true;
    int lines = 0;
    std::istringstream in(log.str());
    for (std::string line; std::getline(in, line); ++lines) {
        std::istringstream fields(line);
        double v;
        for (int k = 0; k < 6 && fields >> v; ++k) finite = finite && std::isfinite(v);
    }
    o.expect(finite && lines == 300 && full.iterations_run == 300, "loss log has non-finite values or wrong length");

    options.log = nullptr;
    options.stop_after = 150;
    (void)finetune(dir / "pretrained.srfg", data, cfg, options, dir / "half.srfg");
    options.stop_after.reset();
    const FinetuneSummary rest = finetune(dir / "half.srfg", data, cfg, options, dir / "resumed.srfg");
    const bool exact = read_file(dir / "full.srfg") == read_file(dir / "resumed.srfg");
    o.expect(exact && rest.start_iteration == 150, "resumed checkpoint differs from the uninterrupted run");

    const EvalReport model = run_protocol(dir / "full.srfg", data, protocol);
    const EvalReport bicubic = run_protocol(bicubic_upscaler(2), "bicubic", data, protocol);
    o.expect(model.mean_psnr >= bicubic.mean_psnr - 0.5,
             "model " + fmt("%.2f", model.mean_psnr) + " dB < bicubic " + fmt("%.2f", bicubic.mean_psnr) + " - 0.5 dB");
    const double secs = seconds_since(t0);
    o.expect(secs < 1200.0, "runtime " + fmt("%.0f s", secs));
    o.note("final losses l1 " + fmt("%.4f", full.last.l1) + " percep " + fmt("%.4f", full.last.perceptual) + " gan_g " +
           fmt("%.4f", full.last.gan_g) + " d " + fmt("%.4f", full.last.d) + "; resume " +
           (exact ? "bit-exact" : "DIFFERS") + "; PSNR pretrained " + fmt("%.2f", pre.mean_psnr) + ", fine-tuned " +
           fmt("%.2f", model.mean_psnr) + ", bicubic " + fmt("%.2f", bicubic.mean_psnr) + " dB; " + fmt("%.0f s", secs));
    return o;
}

// ---- 10: report reproducibility --------------------------------------------------------------

Outcome report_shape() {
    Outcome o;
    TempDir dir("acc_reports");
    fs::create_directories(dir / "drive");
    fs::create_directories(dir / "nih");
    for (int i = 0; i < 2; ++i) write_image(synthetic_fundus(584, 565, 50 + static_cast<std::uint64_t>(i)), dir / "drive" / ("d" + std::to_string(i) + ".png"));
    write_image(synthetic_fundus(1024, 1024, 60), dir / "nih" / "chest.png");

    for (const std::string protocol : {"drive", "nih"}) {
        std::vector<std::string> reports;
        for (int run = 0; run < 2; ++run) {
            const std::string out = (dir / (protocol + std::to_string(run) + ".txt")).string();
            const std::string input = (dir / protocol).string();
            const char* argv[] = {"srforge", "evaluate", "--bicubic", "--protocol", protocol.c_str(), "--input",
                                  input.c_str(), "--output", out.c_str()};
            std::ostringstream sout, serr;
            const int code = run_cli(9, argv, sout, serr);
            o.expect(code == 0, protocol + " evaluate exited " + std::to_string(code) + ": " + serr.str());
            const auto bytes = read_file(out);
            reports.emplace_back(bytes.begin(), bytes.end());
        }
        o.expect(reports[0] == reports[1], protocol + " reports differ between runs");
        std::istringstream in(reports[0]);
        std::vector<std::string> rows;
        bool table = false;
        for (std::string line; std::getline(in, line);) {
            if (!line.empty() && line[0] != '#') rows.push_back(line);
            table = table || line.find(" / ") != std::string::npos;
        }
        const std::size_t images = protocol == "drive" ? 2 : 1;
        o.expect(rows.size() == images + 2 && rows.front() == "name\tpsnr\tssim" && rows.back().rfind("MEAN\t", 0) == 0 &&
                     table,
                 protocol + " report layout");
        o.note(protocol + ": " + rows.back());
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"srforge acceptance checks"};
    std::vector<int> only;
    app.add_option("--only", only, "Run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"generator parameter count", generator_count},
        {"discriminator parameter count", discriminator_count},
        {"gradient suite", gradient_suite},
        {"schedule oracle", schedule},
        {"multi-scale oracle", multiscale},
        {"metric oracles", metric_oracles},
        {"degradation determinism and sanity", degradation_sanity},
        {"overfit convergence", overfit},
        {"end-to-end fine-tune", end_to_end},
        {"report reproducibility", report_shape},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.expect(false, std::string("exception: ") + e.what());
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s  %2d  %-36s %s  [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
