#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gradcheck.hpp"
#include "srforge/image_io.hpp"
#include "srforge/ops.hpp"
#include "srforge/training.hpp"
#include "synthetic.hpp"
#include "tempdir.hpp"

using namespace srforge;
using srforge::testing::TempDir;

namespace fs = std::filesystem;

namespace {

Parameter<float> scalar_param(float v) { return Parameter<float>("p", TensorF::scalar(v)); }

TensorF random_image(Shape s, std::uint64_t seed) {
    SeededRng rng(seed);
    TensorF t(s);
    for (float& v : t.data()) v = static_cast<float>(rng.uniform());
    return t;
}

bool bit_equal(const TensorF& a, const TensorF& b) {
    if (!(a.shape() == b.shape())) return false;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        if (std::bit_cast<std::uint32_t>(a[i]) != std::bit_cast<std::uint32_t>(b[i])) return false;
    }
    return true;
}

bool same_parameters(const Model<float>& a, const Model<float>& b) {
    for (std::size_t k = 0; k < a.parameters().size(); ++k) {
        if (!bit_equal(a.parameters()[k].value, b.parameters()[k].value)) return false;
    }
    return true;
}

const GeneratorConfig kToyGen{3, 3, 8, 1, 4, 2, 0.2};
const DiscriminatorConfig kToyDisc{3, 4, 1};

}  // namespace

// ---- Adam ---------------------------------------------------------------------

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    std::vector<Parameter<float>> params{scalar_param(0.3f)};
    AdamState state(params);
    for (int i = 0; i < 5; ++i) adam_step(params, state, {});
    CHECK(params[0].value[0] == 0.3f);
    CHECK(state.step == 5);
}

TEST_CASE("adam: first step moves by the learning rate against the gradient") {
    std::vector<Parameter<float>> params{scalar_param(0.0f)};
    params[0].grad[0] = 1.0f;
    AdamState state(params);
    adam_step(params, state, {});
    CHECK(params[0].value[0] == doctest::Approx(-1e-4 / (1.0 + 1e-8)).epsilon(1e-6));

    SeededRng rng(4);
    TensorF v({1, 1, 4, 5});
    std::vector<Parameter<float>> many{Parameter<float>("w", v)};
    for (float& g : many[0].grad.data()) g = static_cast<float>(rng.uniform(-3.0, 3.0));
    AdamState s2(many);
    adam_step(many, s2, {0.01, 0.9, 0.99, 1e-8});
    for (std::size_t i = 0; i < v.numel(); ++i) {
        const double moved = many[0].value[i] - v[i];
        CHECK(moved == doctest::Approx(-0.01 * (many[0].grad[i] > 0 ? 1.0 : -1.0)).epsilon(1e-4));
    }
}

TEST_CASE("adam: matches the recurrence over several steps") {
    std::vector<Parameter<float>> params{scalar_param(0.5f)};
    AdamState state(params);
    const AdamHyper h{1e-2, 0.9, 0.99, 1e-8};
    double m = 0.0, v = 0.0, theta = 0.5;
    const double grads[] = {0.3, -1.2, 0.7, 0.0, 2.5, -0.1};
    int t = 0;
    for (double g : grads) {
        params[0].grad[0] = static_cast<float>(g);
        adam_step(params, state, h);
        ++t;
        m = 0.9 * m + 0.1 * g;
        v = 0.99 * v + 0.01 * g * g;
        theta -= 1e-2 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.99, t))) + 1e-8);
        CHECK(params[0].value[0] == doctest::Approx(theta).epsilon(1e-5));
    }
}

TEST_CASE("adam: vanishing learning rate keeps parameters") {
    std::vector<Parameter<float>> params{scalar_param(0.25f)};
    params[0].grad[0] = 5.0f;
    AdamState state(params);
    adam_step(params, state, {1e-30, 0.9, 0.99, 1e-8});
    CHECK(params[0].value[0] == 0.25f);
}

TEST_CASE("adam: misaligned state is rejected") {
    std::vector<Parameter<float>> params{scalar_param(0.0f)};
    AdamState state;
    CHECK_THROWS_AS(adam_step(params, state, {}), std::invalid_argument);
}

// ---- EMA ------------------------------------------------------------------------

TEST_CASE("ema examples") {
    std::vector<Parameter<float>> params{scalar_param(0.0f)};
    EmaState half(params, 0.5);
    params[0].value[0] = 1.0f;
    ema_update(half, params);
    CHECK(half.shadow[0][0] == 0.5f);
    ema_update(half, params);
    CHECK(half.shadow[0][0] == 0.75f);

    params[0].value[0] = 0.0f;
    EmaState zero(params, 0.0), one(params, 1.0);
    params[0].value[0] = 0.37f;
    ema_update(zero, params);
    ema_update(one, params);
    CHECK(zero.shadow[0][0] == 0.37f);
    CHECK(one.shadow[0][0] == 0.0f);
    CHECK_THROWS_AS(EmaState(params, 1.5), std::invalid_argument);
}

TEST_CASE("ema shadow stays inside the hull of its inputs") {
    SeededRng rng(11);
    for (double decay : {0.0, 0.3, 0.9, 0.999, 1.0}) {
        std::vector<Parameter<float>> params{Parameter<float>("w", random_image({1, 1, 8, 8}, 1))};
        EmaState ema(params, decay);
        TensorF lo = params[0].value, hi = params[0].value;
        for (int step = 0; step < 50; ++step) {
            for (std::size_t i = 0; i < lo.numel(); ++i) {
                const float c = static_cast<float>(rng.uniform(-2.0, 2.0));
                params[0].value[i] = c;
                lo[i] = std::min(lo[i], c);
                hi[i] = std::max(hi[i], c);
            }
            ema_update(ema, params);
            for (std::size_t i = 0; i < lo.numel(); ++i) {
                REQUIRE(ema.shadow[0][i] >= lo[i]);
                REQUIRE(ema.shadow[0][i] <= hi[i]);
            }
        }
    }
}

// ---- losses ---------------------------------------------------------------------

TEST_CASE("gan losses: reference values and stability") {
    const auto zeros = Var<float>::constant(TensorF({2, 1, 4, 4}));
    CHECK(gan_loss_g(zeros).value().item() == doctest::Approx(std::numbers::ln2));
    CHECK(gan_loss_d(zeros, zeros).value().item() == doctest::Approx(2 * std::numbers::ln2));
    CHECK(relativistic_loss_g(zeros, zeros).value().item() == doctest::Approx(2 * std::numbers::ln2));
    CHECK(relativistic_loss_d(zeros, zeros).value().item() == doctest::Approx(2 * std::numbers::ln2));

    double previous = INFINITY;
    for (float logit = -6.0f; logit <= 6.0f; logit += 0.5f) {
        const double v = gan_loss_g(Var<float>::constant(TensorF({1, 1, 2, 2}, logit))).value().item();
        CHECK(v < previous);
        CHECK(v >= 0.0);
        previous = v;
    }
    const auto big = Var<float>::constant(TensorF({1, 1, 2, 2}, 80.0f));
    const auto small = Var<float>::constant(TensorF({1, 1, 2, 2}, -80.0f));
    CHECK(gan_loss_g(small).value().item() == doctest::Approx(80.0));
    CHECK(gan_loss_g(big).value().item() == doctest::Approx(0.0).epsilon(1e-30));
    CHECK(gan_loss_d(small, big).value().item() == doctest::Approx(160.0));
    CHECK(std::isfinite(gan_loss_d(big, small).value().item()));
}

TEST_CASE("gan loss gradients match finite differences") {
    SeededRng rng(5);
    const TensorD real = testing::random_tensor({2, 1, 3, 3}, rng, -4, 4);
    const TensorD fake = testing::random_tensor({2, 1, 3, 3}, rng, -4, 4);
    CHECK(testing::max_grad_error([](const auto& v) { return gan_loss_g(v[0]); }, {fake}) < 1e-6);
    CHECK(testing::max_grad_error([](const auto& v) { return gan_loss_d(v[0], v[1]); }, {real, fake}) < 1e-6);
    CHECK(testing::max_grad_error([](const auto& v) { return relativistic_loss_g(v[0], v[1]); }, {real, fake}) <
          1e-6);
    CHECK(testing::max_grad_error([](const auto& v) { return relativistic_loss_d(v[0], v[1]); }, {real, fake}) <
          1e-6);
}

TEST_CASE("feature extractor layout") {
    const FeatureExtractor<float> fx;
    CHECK(fx.parameters().size() == 10);
    CHECK(fx.parameters().front().name == "features.conv1.weight");
    const auto taps = fx.features(Var<float>::constant(random_image({1, 3, 16, 16}, 2)));
    CHECK(taps[0].shape() == Shape{1, 16, 16, 16});
    CHECK(taps[1].shape() == Shape{1, 32, 8, 8});
    const FeatureExtractor<float> again;
    CHECK(same_parameters(fx, again));
}

TEST_CASE("perceptual loss: zero on equal inputs, non-negative, shape checked") {
    const FeatureExtractor<float> fx;
    const auto a = Var<float>::constant(random_image({1, 3, 16, 16}, 3));
    const auto b = Var<float>::constant(random_image({1, 3, 16, 16}, 4));
    CHECK(perceptual_loss(a, a, fx).value().item() == 0.0f);
    CHECK(perceptual_loss(a, b, fx).value().item() > 0.0f);
    const auto c = Var<float>::constant(random_image({1, 3, 8, 16}, 4));
    CHECK_THROWS_AS((void)perceptual_loss(a, c, fx), ShapeError);
}

TEST_CASE("perceptual loss gradient in f32 agrees with finite differences") {
    const FeatureExtractor<float> fx;
    const FeatureExtractor<double> fxd;
    const TensorF sr = random_image({1, 3, 16, 16}, 8);
    const TensorF hr = random_image({1, 3, 16, 16}, 9);

    Tape<float> tape;
    const Var<float> x = tape.leaf(sr);
    const Var<float> loss = perceptual_loss(x, Var<float>::constant(hr), fx);
    tape.backward(loss);
    const TensorF g = tape.grad(x);

    // Differences on the double path with identical weights.
    TensorD xs = sr.cast<double>();
    const auto hd = Var<double>::constant(hr.cast<double>());
    auto objective = [&] { return perceptual_loss(Var<double>::constant(xs), hd, fxd).value().item(); };
    double err2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 0; i < xs.numel(); ++i) {
        const double n = testing::kink_aware_difference(xs[i], objective, 1e-4);
        err2 += (g[i] - n) * (g[i] - n);
        ref2 += n * n;
    }
    CHECK(std::sqrt(err2 / ref2) < 1e-2);
    CHECK(fx.parameters()[0].grad[0] == 0.0f);
}

TEST_CASE("perceptual loss gradient on the double path") {
    const FeatureExtractor<double> fx;
    SeededRng rng(21);
    const TensorD sr = testing::random_tensor({1, 3, 8, 8}, rng, 0, 1);
    const TensorD hr = testing::random_tensor({1, 3, 8, 8}, rng, 0, 1);
    Tape<double> tape;
    const Var<double> x = tape.leaf(sr);
    tape.backward(perceptual_loss(x, Var<double>::constant(hr), fx));
    const TensorD g = tape.grad(x);
    TensorD xs = sr;
    auto objective = [&] { return perceptual_loss(Var<double>::constant(xs), Var<double>::constant(hr), fx).value().item(); };
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.numel(); ++i) {
        worst = std::max(worst, testing::rel_error(g[i], testing::kink_aware_difference(xs[i], objective, 1e-5)));
    }
    CHECK(worst < 1e-3);
}

// ---- schedule and config --------------------------------------------------------

TEST_CASE("plan_schedule") {
    CHECK(plan_schedule(397, 10, 75) == 3000);
    CHECK(plan_schedule(3310, 10, 50) == 16550);
    CHECK(std::abs(16550 - 16600) / 16600.0 < 0.004);
    CHECK(plan_schedule(10, 10, 1) == 1);
    CHECK(plan_schedule(11, 10, 1.5) == 3);
    CHECK_THROWS_AS((void)plan_schedule(0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)plan_schedule(5, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)plan_schedule(5, 1, 0), std::invalid_argument);
}

TEST_CASE("train config from ini") {
    const auto ini = IniConfig::parse(
        "[train]\nlearning_rate = 2e-4\nbatch_size = 4\ntotal_iterations = 77\nweight_gan = 0\n"
        "gan_mode = relativistic\nseed = 18446744073709551615\npatch_size = 64\n");
    const TrainConfig c = TrainConfig::from_ini(ini);
    CHECK(c.learning_rate == 2e-4);
    CHECK(c.batch_size == 4);
    CHECK(c.total_iterations == 77);
    CHECK(c.loss_weights.gan == 0.0);
    CHECK(c.loss_weights.l1 == 1.0);
    CHECK(c.gan_mode == GanMode::relativistic);
    CHECK(c.seed == 18446744073709551615ull);
    CHECK(c.patch_size == 64);

    const TrainConfig d;
    CHECK(d.learning_rate == 1e-4);
    CHECK(d.batch_size == 10);
    CHECK(d.ema_decay == 0.999);
    CHECK(d.patch_size == 128);
    CHECK(d.save_interval == 500);

    CHECK_THROWS_AS((void)TrainConfig::from_ini(IniConfig::parse("[train]\nlearnng_rate = 1\n")), ConfigError);
    CHECK_THROWS_AS((void)TrainConfig::from_ini(IniConfig::parse("[train]\nlearning_rate = 0\n")), ConfigError);
    CHECK_THROWS_AS((void)TrainConfig::from_ini(IniConfig::parse("[train]\nadam_beta1 = 1\n")), ConfigError);
    CHECK_THROWS_AS((void)TrainConfig::from_ini(IniConfig::parse("[train]\nbatch_size = 0\n")), ConfigError);
    CHECK_THROWS_AS((void)TrainConfig::from_ini(IniConfig::parse("[train]\ngan_mode = wgan\n")), ConfigError);
    CHECK_THROWS_AS((void)TrainConfig::from_ini(IniConfig::parse("[train]\nseed = -1\n")), ConfigError);
}

// ---- data -----------------------------------------------------------------------

TEST_CASE("sample_crop returns a dihedral view of some window") {
    TensorF img({1, 3, 20, 24});
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < 20; ++y) {
            for (int x = 0; x < 24; ++x) img.at(0, c, y, x) = static_cast<float>(c * 10000 + y * 100 + x);
        }
    }
    std::set<int> orientations;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        SeededRng rng(seed);
        const TensorF crop = sample_crop({img}, 8, rng);
        REQUIRE(crop.shape() == Shape{1, 3, 8, 8});
        // Recover the window from its min corner value and check each of the
        // eight symmetries of the square.
        float lo = crop[0];
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) lo = std::min(lo, crop.at(0, 0, y, x));
        }
        const int y0 = static_cast<int>(lo) / 100, x0 = static_cast<int>(lo) % 100;
        int match = -1;
        for (int o = 0; o < 8 && match < 0; ++o) {
            bool ok = true;
            for (int y = 0; y < 8 && ok; ++y) {
                for (int x = 0; x < 8 && ok; ++x) {
                    int sy = y, sx = x;
                    if (o & 1) std::swap(sy, sx);
                    if (o & 2) sy = 7 - sy;
                    if (o & 4) sx = 7 - sx;
                    for (int c = 0; c < 3; ++c) ok = ok && crop.at(0, c, y, x) == img.at(0, c, y0 + sy, x0 + sx);
                }
            }
            if (ok) match = o;
        }
        REQUIRE(match >= 0);
        orientations.insert(match);
    }
    CHECK(orientations.size() == 8);
    SeededRng a(3), b(3);
    CHECK(sample_crop({img}, 8, a) == sample_crop({img}, 8, b));
    SeededRng c(3);
    CHECK_THROWS_AS((void)sample_crop({img}, 21, c), ShapeError);
}

TEST_CASE("synthesize_lr degrades each item with its own stream") {
    const TensorF hr = stack_batch({testing::synthetic_fundus(32, 32, 1), testing::synthetic_fundus(32, 32, 2)});
    DegradationConfig deg = DegradationConfig::defaults();
    deg.output_scale = 2;
    const TensorF lr = synthesize_lr(hr, deg, 99, 2);
    CHECK(lr.shape() == Shape{2, 3, 16, 16});
    CHECK(lr == synthesize_lr(hr, deg, 99, 1));
    SeededRng second = SeededRng::for_item(99, 1);
    const TensorF only = degrade(testing::synthetic_fundus(32, 32, 2), deg, second).image;
    for (std::size_t i = 0; i < only.numel(); ++i) REQUIRE(lr[only.numel() + i] == only[i]);
}

// ---- train step -----------------------------------------------------------------

TEST_CASE("l1-only training overfits one pair") {
    Generator<float> gen(kToyGen, 3);
    const TensorF hr = testing::synthetic_fundus(16, 16, 5);
    const TensorF lr = resize(hr, 8, 8, ResizeMethod::bicubic);
    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.loss_weights = {1.0, 0.0, 0.0};
    TrainState state(gen, nullptr, cfg.ema_decay);
    const FeatureExtractor<float> fx;
    const double first = train_step(gen, nullptr, fx, lr, hr, cfg, state).l1;
    double last = first;
    for (int i = 1; i < 200; ++i) last = train_step(gen, nullptr, fx, lr, hr, cfg, state).l1;
    CHECK(last < 0.2 * first);
    CHECK(state.iteration == 200);
    CHECK(state.generator_opt.step == 200);
}

TEST_CASE("train_step is deterministic and the discriminator half leaves the generator alone") {
    const TensorF hr = stack_batch({testing::synthetic_fundus(16, 16, 1), testing::synthetic_fundus(16, 16, 2)});
    const TensorF lr = resize(hr, 8, 8, ResizeMethod::bilinear);
    TrainConfig cfg;
    const FeatureExtractor<float> fx;
    std::vector<std::vector<double>> runs;
    for (int run = 0; run < 2; ++run) {
        Generator<float> gen(kToyGen, 1);
        Discriminator<float> disc(kToyDisc, 2);
        TrainState state(gen, &disc, cfg.ema_decay);
        std::vector<double> trace;
        for (int i = 0; i < 3; ++i) {
            const StepLosses s = train_step(gen, &disc, fx, lr, hr, cfg, state);
            for (double v : {s.l1, s.perceptual, s.gan_g, s.d}) {
                CHECK(std::isfinite(v));
                trace.push_back(v);
            }
        }
        CHECK(state.discriminator_opt.step == 3);
        runs.push_back(trace);

        const Generator<float> before = gen;
        const TensorF sr = gen.forward(Var<float>::borrowed(lr)).value();
        const Discriminator<float> disc_before = disc;
        (void)discriminator_step(disc, sr, hr, cfg, state);
        CHECK(same_parameters(gen, before));
        CHECK_FALSE(same_parameters(disc, disc_before));
    }
    CHECK(runs[0] == runs[1]);
}

TEST_CASE("gan weight zero skips the discriminator") {
    const TensorF hr = testing::synthetic_fundus(16, 16, 1);
    const TensorF lr = resize(hr, 8, 8, ResizeMethod::bilinear);
    TrainConfig cfg;
    cfg.loss_weights.gan = 0.0;
    Generator<float> gen(kToyGen, 1);
    Discriminator<float> disc(kToyDisc, 2);
    const Discriminator<float> before = disc;
    TrainState state(gen, &disc, cfg.ema_decay);
    const StepLosses s = train_step(gen, &disc, FeatureExtractor<float>{}, lr, hr, cfg, state);
    CHECK(s.gan_g == 0.0);
    CHECK(s.d == 0.0);
    CHECK(same_parameters(disc, before));
    CHECK(bit_equal(disc.buffers()[0].value, before.buffers()[0].value));

    cfg.loss_weights.gan = 0.1;
    CHECK_THROWS_AS((void)train_step(gen, nullptr, FeatureExtractor<float>{}, lr, hr, cfg, state), std::invalid_argument);
}

TEST_CASE("non-finite losses abort naming the term") {
    const TensorF lr = testing::synthetic_fundus(8, 8, 1);
    TensorF hr = testing::synthetic_fundus(16, 16, 1);
    hr[5] = NAN;
    TrainConfig cfg;
    cfg.loss_weights = {1.0, 0.0, 0.0};
    Generator<float> gen(kToyGen, 1);
    TrainState state(gen, nullptr, cfg.ema_decay);
    CHECK_THROWS_WITH_AS((void)train_step(gen, nullptr, FeatureExtractor<float>{}, lr, hr, cfg, state),
                         doctest::Contains("'l1'"), NonFiniteLossError);
}

// ---- finetune -------------------------------------------------------------------

namespace {

struct FinetuneFixture {
    TempDir dir{"finetune"};
    fs::path data = dir / "data";
    fs::path init = dir / "init.srfg";
    TrainConfig cfg;
    FinetuneOptions options;

    FinetuneFixture() {
        fs::create_directories(data);
        for (int i = 0; i < 3; ++i) write_image(testing::synthetic_fundus(40, 44, 30 + i), data / ("img" + std::to_string(i) + ".png"));
        Generator<float> gen(kToyGen, 5);
        Checkpoint c;
        c.meta.generator = gen.config();
        export_model(gen, c);
        save_checkpoint(c, init);
        cfg.batch_size = 2;
        cfg.patch_size = 16;
        cfg.seed = 123;
        cfg.save_interval = 4;
        options.degradation.output_scale = 2;
        options.discriminator = kToyDisc;
        options.threads = 2;
    }
};

}  // namespace

TEST_CASE("finetune runs, logs and resumes bit-exactly") {
    FinetuneFixture f;
    f.cfg.total_iterations = 10;
    std::ostringstream log;
    f.options.log = &log;
    const FinetuneSummary full = finetune(f.init, f.data, f.cfg, f.options, f.dir / "full.srfg");
    CHECK(full.iterations_run == 10);
    CHECK(full.end_iteration == 10);
    CHECK(full.discriminator_initialized);

    std::istringstream lines(log.str());
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        ++count;
        CHECK(std::count(line.begin(), line.end(), '\t') == 5);
        CHECK(line.rfind(std::to_string(count) + "\t", 0) == 0);
    }
    CHECK(count == 10);

    f.options.log = nullptr;
    f.options.stop_after = 6;
    const FinetuneSummary part = finetune(f.init, f.data, f.cfg, f.options, f.dir / "part.srfg");
    CHECK(part.end_iteration == 6);
    f.options.stop_after.reset();
    const FinetuneSummary rest = finetune(f.dir / "part.srfg", f.data, f.cfg, f.options, f.dir / "resumed.srfg");
    CHECK(rest.start_iteration == 6);
    CHECK(rest.iterations_run == 4);
    CHECK_FALSE(rest.discriminator_initialized);
    CHECK(read_file(f.dir / "full.srfg") == read_file(f.dir / "resumed.srfg"));

    const Checkpoint out = load_checkpoint(f.dir / "full.srfg");
    CHECK(out.meta.iteration == 10);
    CHECK(out.has_prefix("ema.generator."));
    CHECK(out.has_prefix("adam.m.discriminator."));
    CHECK(out.tensors.contains("discriminator.conv0.weight_u"));
    const Generator<float> served = load_inference_generator(out);
    CHECK(bit_equal(served.parameters()[0].value, out.tensors.at("ema.generator.conv_first.weight")));
}

TEST_CASE("finetune rejects mismatched checkpoints and carries unknown tensors") {
    FinetuneFixture f;
    f.cfg.total_iterations = 1;
    Checkpoint c = load_checkpoint(f.init);
    c.tensors["extra.note"] = TensorF::scalar(7.0f);
    save_checkpoint(c, f.dir / "extra.srfg");
    const FinetuneSummary s = finetune(f.dir / "extra.srfg", f.data, f.cfg, f.options, f.dir / "out.srfg");
    CHECK(s.carried_tensors == std::vector<std::string>{"extra.note"});
    CHECK(load_checkpoint(f.dir / "out.srfg").tensors.at("extra.note")[0] == 7.0f);

    c.tensors["generator.conv_body.weight"] = TensorF({8, 8, 1, 1});
    save_checkpoint(c, f.dir / "bad.srfg");
    CHECK_THROWS_WITH_AS((void)finetune(f.dir / "bad.srfg", f.data, f.cfg, f.options, f.dir / "o.srfg"),
                         doctest::Contains("generator.conv_body.weight"), CheckpointError);

    FinetuneOptions wrong = f.options;
    wrong.degradation.output_scale = 4;
    CHECK_THROWS_AS((void)finetune(f.init, f.data, f.cfg, wrong, f.dir / "o.srfg"), ConfigError);

    TempDir empty("ft_empty");
    CHECK_THROWS((void)finetune(f.init, empty.path(), f.cfg, f.options, f.dir / "o.srfg"));
}

TEST_CASE("finetune never reinitializes loaded tensors") {
    FinetuneFixture f;
    f.cfg.total_iterations = 0;
    const FinetuneSummary s = finetune(f.init, f.data, f.cfg, f.options, f.dir / "zero.srfg");
    CHECK(s.iterations_run == 0);
    const Checkpoint in = load_checkpoint(f.init);
    const Checkpoint out = load_checkpoint(f.dir / "zero.srfg");
    for (const auto& [name, t] : in.tensors) CHECK(bit_equal(out.tensors.at(name), t));
}
