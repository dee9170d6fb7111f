#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <set>

#include "srforge/image_io.hpp"
#include "srforge/parallel.hpp"
#include "srforge/training.hpp"

namespace srforge {

namespace fs = std::filesystem;

namespace {

constexpr const char* kRunMarker = "finetune.seed";
constexpr const char* kGenStep = "adam.generator.step";
constexpr const char* kDiscStep = "adam.discriminator.step";
constexpr std::uint64_t kDiscriminatorInitStream = 0xD15C;

void export_adam(const std::vector<Parameter<float>>& params, const AdamState& opt, Checkpoint& ckpt) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        ckpt.tensors.insert_or_assign("adam.m." + params[i].name, opt.m[i]);
        ckpt.tensors.insert_or_assign("adam.v." + params[i].name, opt.v[i]);
    }
}

/// Loads moments for every parameter when all are present; otherwise leaves
/// `opt` fresh. Returns whether state was found.
bool import_adam(const std::vector<Parameter<float>>& params, AdamState& opt, const Checkpoint& ckpt,
                 const char* step_key, std::set<std::string>& claimed) {
    for (const auto& p : params) {
        if (!ckpt.tensors.contains("adam.m." + p.name) || !ckpt.tensors.contains("adam.v." + p.name)) return false;
    }
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < params.size(); ++i) {
        for (auto [prefix, dst] : {std::pair{"adam.m.", &opt.m[i]}, std::pair{"adam.v.", &opt.v[i]}}) {
            const std::string key = prefix + params[i].name;
            const TensorF& t = ckpt.tensors.at(key);
            if (!(t.shape() == params[i].value.shape())) {
                problems.push_back(key + " has shape " + t.shape().str() + ", model expects " +
                                   params[i].value.shape().str());
                continue;
            }
            *dst = t;
            claimed.insert(key);
        }
    }
    if (!problems.empty()) {
        std::string msg = "checkpoint optimizer state does not match the model:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw CheckpointError(msg);
    }
    auto it = ckpt.meta.notes.find(step_key);
    opt.step = it == ckpt.meta.notes.end() ? 0 : std::stoll(it->second);
    return true;
}

bool import_ema(const Generator<float>& gen, EmaState& ema, const Checkpoint& ckpt, std::set<std::string>& claimed) {
    if (!ckpt.has_prefix("ema.")) return false;
    Generator<float> shadow = gen;
    import_model(shadow, ckpt, "ema.", &claimed);
    for (std::size_t i = 0; i < shadow.parameters().size(); ++i) ema.shadow[i] = shadow.parameters()[i].value;
    return true;
}

}  // namespace

void export_training(const Generator<float>& gen, const Discriminator<float>* disc, const TrainState& state,
                     Checkpoint& ckpt) {
    ckpt.meta.iteration = state.iteration;
    ckpt.meta.generator = gen.config();
    export_model(gen, ckpt);
    const auto& params = gen.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) ckpt.tensors.insert_or_assign("ema." + params[i].name, state.ema.shadow[i]);
    export_adam(params, state.generator_opt, ckpt);
    ckpt.meta.notes[kGenStep] = std::to_string(state.generator_opt.step);
    if (disc != nullptr) {
        ckpt.meta.discriminator = disc->config();
        export_model(*disc, ckpt);
        export_adam(disc->parameters(), state.discriminator_opt, ckpt);
        ckpt.meta.notes[kDiscStep] = std::to_string(state.discriminator_opt.step);
    }
}

Generator<float> load_inference_generator(const Checkpoint& ckpt) {
    if (!ckpt.meta.generator) throw CheckpointError("checkpoint has no generator configuration");
    Generator<float> gen(*ckpt.meta.generator, 0);
    import_model(gen, ckpt, ckpt.has_prefix("ema.generator.") ? "ema." : "");
    return gen;
}

FinetuneSummary finetune(const fs::path& checkpoint_in, const fs::path& dataset_dir, const TrainConfig& cfg,
                         const FinetuneOptions& options, const fs::path& checkpoint_out) {
    cfg.validate();
    options.degradation.validate();
    const Checkpoint ckpt = load_checkpoint(checkpoint_in);
    if (!ckpt.meta.generator) throw CheckpointError(checkpoint_in.string() + ": no generator configuration");
    if (ckpt.meta.generator->scale != options.degradation.output_scale) {
        throw ConfigError("generator scale " + std::to_string(ckpt.meta.generator->scale) +
                          " does not match degradation output_scale " +
                          std::to_string(options.degradation.output_scale));
    }
    FinetuneSummary summary;
    std::set<std::string> claimed;

    Generator<float> gen(*ckpt.meta.generator, 0);
    import_model(gen, ckpt, "", &claimed);

    const DiscriminatorConfig dcfg = ckpt.meta.discriminator.value_or(options.discriminator);
    Discriminator<float> disc(dcfg, SeededRng::derive_seed(cfg.seed, kDiscriminatorInitStream));
    if (ckpt.has_prefix("discriminator.")) {
        import_model(disc, ckpt, "", &claimed);
    } else {
        spdlog::warn("{}: no discriminator tensors, initializing a fresh discriminator", checkpoint_in.string());
        summary.discriminator_initialized = true;
    }

    FeatureExtractor<float> fx(0);
    if (ckpt.has_prefix("features.")) import_model(fx, ckpt, "", &claimed);
    if (options.feature_weights) import_model(fx, load_checkpoint(*options.feature_weights));

    TrainState state(gen, &disc, cfg.ema_decay);
    const bool resume = !options.restart && ckpt.meta.notes.contains(kRunMarker);
    if (resume) {
        state.iteration = ckpt.meta.iteration;
        import_ema(gen, state.ema, ckpt, claimed);
        import_adam(gen.parameters(), state.generator_opt, ckpt, kGenStep, claimed);
        if (!summary.discriminator_initialized) {
            import_adam(disc.parameters(), state.discriminator_opt, ckpt, kDiscStep, claimed);
        }
        if (ckpt.meta.notes.at(kRunMarker) != std::to_string(cfg.seed)) {
            spdlog::warn("resuming a run started with seed {} using seed {}", ckpt.meta.notes.at(kRunMarker), cfg.seed);
        }
    }

    Checkpoint carried;
    for (const auto& [name, t] : ckpt.tensors) {
        if (claimed.contains(name)) continue;
        if (name.rfind("ema.", 0) == 0 || name.rfind("adam.", 0) == 0) continue;
        spdlog::warn("{}: tensor {} is not used by training and is carried through unchanged", checkpoint_in.string(), name);
        carried.tensors.emplace(name, t);
        summary.carried_tensors.push_back(name);
    }

    std::vector<std::string> skipped;
    std::vector<TensorF> images;
    for (auto& item : load_images(dataset_dir, &skipped)) {
        if (item.image.h() < cfg.patch_size || item.image.w() < cfg.patch_size) {
            spdlog::warn("{}: smaller than the {}px patch, skipped", item.name, cfg.patch_size);
            continue;
        }
        images.push_back(std::move(item.image));
    }
    if (images.empty()) throw std::runtime_error("finetune: no usable training images in " + dataset_dir.string());

    auto save = [&] {
        Checkpoint out = carried;
        export_training(gen, &disc, state, out);
        out.meta.notes[kRunMarker] = std::to_string(cfg.seed);
        save_checkpoint(out, checkpoint_out);
    };

    summary.start_iteration = state.iteration;
    std::int64_t stop = cfg.total_iterations;
    if (options.stop_after) stop = std::min<std::int64_t>(stop, *options.stop_after);
    const int threads = resolve_threads(options.threads);
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    while (state.iteration < stop) {
        const auto started = std::chrono::steady_clock::now();
        const std::uint64_t iter_seed = SeededRng::derive_seed(cfg.seed, static_cast<std::uint64_t>(state.iteration));
        std::vector<TensorF> hr(batch);
        std::vector<TensorF> lr(batch);
        parallel_for(batch, threads, [&](std::size_t b) {
            SeededRng rng = SeededRng::for_item(iter_seed, b);
            hr[b] = sample_crop(images, cfg.patch_size, rng);
            lr[b] = degrade(hr[b], options.degradation, rng).image;
        });
        summary.last = train_step(gen, &disc, fx, stack_batch(lr), stack_batch(hr), cfg, state);
        ++summary.iterations_run;
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (options.log != nullptr) {
            char line[256];
            std::snprintf(line, sizeof line, "%lld\t%.6f\t%.6f\t%.6f\t%.6f\t%.3f\n",
                          static_cast<long long>(state.iteration), summary.last.l1, summary.last.perceptual,
                          summary.last.gan_g, summary.last.d, seconds);
            *options.log << line << std::flush;
        }
        if (state.iteration % cfg.save_interval == 0 || state.iteration == stop) save();
    }
    if (summary.iterations_run == 0) save();
    summary.end_iteration = state.iteration;
    return summary;
}

}  // namespace srforge
