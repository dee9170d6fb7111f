#include <chrono>
#include <cmath>
#include <stdexcept>

#include "srforge/ops.hpp"
#include "srforge/parallel.hpp"
#include "srforge/training.hpp"

namespace srforge {

void TrainConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("train config: " + msg); };
    if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) fail("adam_beta1 must lie in [0, 1)");
    if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) fail("adam_beta2 must lie in [0, 1)");
    if (!(adam_epsilon > 0.0)) fail("adam_epsilon must be > 0");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (total_iterations < 0) fail("total_iterations must be >= 0");
    if (!(ema_decay >= 0.0 && ema_decay <= 1.0)) fail("ema_decay must lie in [0, 1]");
    if (patch_size < 8 || patch_size % 8 != 0) fail("patch_size must be a positive multiple of 8");
    if (save_interval < 1) fail("save_interval must be >= 1");
    const LossWeights& w = loss_weights;
    if (!(w.l1 >= 0.0 && w.perceptual >= 0.0 && w.gan >= 0.0)) fail("loss weights must be >= 0");
    if (w.l1 + w.perceptual + w.gan <= 0.0) fail("at least one loss weight must be positive");
}

TrainConfig TrainConfig::from_ini(const IniConfig& ini) {
    TrainConfig c;
    const std::string s = "train";
    c.learning_rate = ini.get_double(s, "learning_rate", c.learning_rate);
    c.adam_beta1 = ini.get_double(s, "adam_beta1", c.adam_beta1);
    c.adam_beta2 = ini.get_double(s, "adam_beta2", c.adam_beta2);
    c.adam_epsilon = ini.get_double(s, "adam_epsilon", c.adam_epsilon);
    c.batch_size = ini.get_int(s, "batch_size", c.batch_size);
    c.total_iterations = ini.get_int(s, "total_iterations", c.total_iterations);
    c.loss_weights.l1 = ini.get_double(s, "weight_l1", c.loss_weights.l1);
    c.loss_weights.perceptual = ini.get_double(s, "weight_perceptual", c.loss_weights.perceptual);
    c.loss_weights.gan = ini.get_double(s, "weight_gan", c.loss_weights.gan);
    const std::string mode = ini.get_string(s, "gan_mode", "logistic");
    if (mode == "logistic") {
        c.gan_mode = GanMode::logistic;
    } else if (mode == "relativistic") {
        c.gan_mode = GanMode::relativistic;
    } else {
        throw ConfigError("train config: gan_mode must be logistic or relativistic, got '" + mode + "'");
    }
    c.ema_decay = ini.get_double(s, "ema_decay", c.ema_decay);
    c.patch_size = ini.get_int(s, "patch_size", c.patch_size);
    c.save_interval = ini.get_int(s, "save_interval", c.save_interval);
    const std::string seed = ini.get_string(s, "seed", std::to_string(c.seed));
    try {
        if (seed.empty() || seed.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument(seed);
        }
        c.seed = std::stoull(seed);
    } catch (const std::exception&) {
        throw ConfigError("train config: seed must be an unsigned integer, got '" + seed + "'");
    }
    for (const std::string& key : ini.unused_keys()) {
        if (key.rfind(s + ".", 0) == 0) throw ConfigError("train config: unknown key " + key);
    }
    c.validate();
    return c;
}

int plan_schedule(int num_images, int batch_size, double epochs) {
    if (num_images < 1 || batch_size < 1 || !(epochs > 0.0)) {
        throw std::invalid_argument("plan_schedule: inputs must be positive");
    }
    const int per_epoch = (num_images + batch_size - 1) / batch_size;
    return static_cast<int>(std::lround(epochs * per_epoch));
}

TrainState::TrainState(const Generator<float>& gen, const Discriminator<float>* disc, double ema_decay)
    : generator_opt(gen.parameters()), ema(gen.parameters(), ema_decay) {
    if (disc != nullptr) discriminator_opt = AdamState(disc->parameters());
}

namespace {

void check_finite(double v, const char* term, std::int64_t iteration) {
    if (!std::isfinite(v)) {
        throw NonFiniteLossError("non-finite loss term '" + std::string(term) + "' at iteration " +
                                 std::to_string(iteration + 1));
    }
}

TensorF take_item(const TensorF& batch, int n) {
    const Shape s = batch.shape();
    TensorF out({1, s.c, s.h, s.w});
    const std::size_t len = static_cast<std::size_t>(s.c) * s.plane();
    std::copy_n(batch.ptr() + static_cast<std::size_t>(n) * len, len, out.ptr());
    return out;
}

}  // namespace

Var<float> generator_step(Generator<float>& gen, Discriminator<float>* disc, const FeatureExtractor<float>& fx,
                          const TensorF& lr, const TensorF& hr, const TrainConfig& cfg, TrainState& state,
                          StepLosses& losses) {
    const LossWeights& w = cfg.loss_weights;
    const bool adversarial = w.gan > 0.0;
    if (adversarial && disc == nullptr) throw std::invalid_argument("train_step: gan weight set but no discriminator");

    gen.zero_grad();
    Tape<float> tape;
    const Var<float> hr_v = Var<float>::borrowed(hr);
    const Var<float> sr = gen.forward(Var<float>::borrowed(lr), &tape);
    require_same_shape(sr.shape(), hr.shape(), "train_step: generator output vs hr");

    Var<float> total;
    auto accumulate = [&](const Var<float>& term, double weight, double& slot, const char* name) {
        slot = term.value().item();
        check_finite(slot, name, state.iteration);
        const Var<float> scaled = scale(term, static_cast<float>(weight));
        total = total.shared() ? add(total, scaled) : scaled;
    };
    if (w.l1 > 0.0) accumulate(mean_abs_diff(sr, hr_v), w.l1, losses.l1, "l1");
    if (w.perceptual > 0.0) accumulate(perceptual_loss(sr, hr_v, fx), w.perceptual, losses.perceptual, "perceptual");
    if (adversarial) {
        const Var<float> fake = disc->forward(sr, nullptr, true);
        if (cfg.gan_mode == GanMode::relativistic) {
            const Var<float> real = disc->forward(hr_v, nullptr, true);
            accumulate(relativistic_loss_g(real.detach(), fake), w.gan, losses.gan_g, "gan_g");
        } else {
            accumulate(gan_loss_g(fake), w.gan, losses.gan_g, "gan_g");
        }
    }
    tape.backward(total);
    adam_step(gen.parameters(), state.generator_opt, cfg.adam());
    ema_update(state.ema, gen.parameters());
    return sr.detach();
}

double discriminator_step(Discriminator<float>& disc, const TensorF& sr, const TensorF& hr, const TrainConfig& cfg,
                          TrainState& state) {
    require_same_shape(sr.shape(), hr.shape(), "discriminator step: sr vs hr");
    disc.zero_grad();
    Tape<float> tape;
    const Var<float> real = disc.forward(Var<float>::borrowed(hr), &tape, true);
    const Var<float> fake = disc.forward(Var<float>::borrowed(sr), &tape, true);
    const Var<float> loss =
        cfg.gan_mode == GanMode::relativistic ? relativistic_loss_d(real, fake) : gan_loss_d(real, fake);
    const double value = loss.value().item();
    check_finite(value, "d", state.iteration);
    tape.backward(loss);
    adam_step(disc.parameters(), state.discriminator_opt, cfg.adam());
    return value;
}

StepLosses train_step(Generator<float>& gen, Discriminator<float>* disc, const FeatureExtractor<float>& fx,
                      const TensorF& lr, const TensorF& hr, const TrainConfig& cfg, TrainState& state) {
    StepLosses out;
    const Var<float> sr = generator_step(gen, disc, fx, lr, hr, cfg, state, out);
    if (cfg.loss_weights.gan > 0.0) out.d = discriminator_step(*disc, sr.value(), hr, cfg, state);
    ++state.iteration;
    return out;
}

TensorF stack_batch(const std::vector<TensorF>& items) {
    if (items.empty()) throw std::invalid_argument("stack_batch: no items");
    const Shape s = items.front().shape();
    TensorF out({static_cast<int>(items.size()) * s.n, s.c, s.h, s.w});
    float* dst = out.ptr();
    for (const auto& t : items) {
        require_same_shape(t.shape(), s, "stack_batch");
        dst = std::copy(t.data().begin(), t.data().end(), dst);
    }
    return out;
}

TensorF synthesize_lr(const TensorF& hr_batch, const DegradationConfig& deg, std::uint64_t seed,
                      std::optional<int> threads) {
    const int n = hr_batch.n();
    std::vector<TensorF> lr(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), resolve_threads(threads), [&](std::size_t i) {
        SeededRng rng = SeededRng::for_item(seed, i);
        lr[i] = degrade(take_item(hr_batch, static_cast<int>(i)), deg, rng).image;
    });
    return stack_batch(lr);
}

TensorF sample_crop(const std::vector<TensorF>& images, int patch_size, SeededRng& rng) {
    if (images.empty()) throw std::invalid_argument("sample_crop: no images");
    const TensorF& img = images[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(images.size()) - 1))];
    const Shape s = img.shape();
    if (s.h < patch_size || s.w < patch_size) {
        throw ShapeError("sample_crop: image " + s.str() + " smaller than patch " + std::to_string(patch_size));
    }
    const int y0 = rng.uniform_int(0, s.h - patch_size);
    const int x0 = rng.uniform_int(0, s.w - patch_size);
    const bool flip = rng.bernoulli(0.5);
    const int turns = rng.uniform_int(0, 3);
    const int p = patch_size;
    TensorF out({1, s.c, p, p});
    for (int c = 0; c < s.c; ++c) {
        for (int y = 0; y < p; ++y) {
            for (int x = 0; x < p; ++x) {
                // Output (y, x) reads the flipped crop rotated counter-clockwise `turns` times.
                int sy = y, sx = x;
                for (int t = 0; t < turns; ++t) {
                    const int ny = sx;
                    const int nx = p - 1 - sy;
                    sy = ny;
                    sx = nx;
                }
                if (flip) sx = p - 1 - sx;
                out.at(0, c, y, x) = img.at(0, c, y0 + sy, x0 + sx);
            }
        }
    }
    return out;
}

}  // namespace srforge
