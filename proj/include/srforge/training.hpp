#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "srforge/checkpoint.hpp"
#include "srforge/config.hpp"
#include "srforge/degradation.hpp"
#include "srforge/losses.hpp"
#include "srforge/networks.hpp"
#include "srforge/optim.hpp"

namespace srforge {

struct LossWeights {
    double l1 = 1.0;
    double perceptual = 1.0;
    double gan = 0.1;
};

enum class GanMode { logistic, relativistic };

struct TrainConfig {
    double learning_rate = 1e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.99;
    double adam_epsilon = 1e-8;
    int batch_size = 10;
    /// Absolute target: a resumed run stops when the iteration counter reaches it.
    int total_iterations = 3000;
    LossWeights loss_weights;
    GanMode gan_mode = GanMode::logistic;
    double ema_decay = 0.999;
    /// HR crop edge.
    int patch_size = 128;
    std::uint64_t seed = 0;
    int save_interval = 500;

    void validate() const;
    [[nodiscard]] AdamHyper adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_epsilon}; }

    /// Reads the `[train]` section; unknown keys there are rejected.
    static TrainConfig from_ini(const IniConfig& ini);
};

/// round(epochs * ceil(num_images / batch_size)).
int plan_schedule(int num_images, int batch_size, double epochs);

/// Optimizer and EMA state that travels with a generator/discriminator pair.
struct TrainState {
    AdamState generator_opt;
    AdamState discriminator_opt;
    EmaState ema;
    std::int64_t iteration = 0;

    TrainState() = default;
    TrainState(const Generator<float>& gen, const Discriminator<float>* disc, double ema_decay);
};

struct StepLosses {
    double l1 = 0.0;
    double perceptual = 0.0;
    double gan_g = 0.0;
    double d = 0.0;
};

class NonFiniteLossError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Generator half of a step: forward, weighted losses into `losses`, Adam,
/// EMA. Returns the detached sr batch.
Var<float> generator_step(Generator<float>& gen, Discriminator<float>* disc, const FeatureExtractor<float>& fx,
                          const TensorF& lr, const TensorF& hr, const TrainConfig& cfg, TrainState& state,
                          StepLosses& losses);

/// Discriminator half of a step on real `hr` and generated `sr`; returns its loss.
double discriminator_step(Discriminator<float>& disc, const TensorF& sr, const TensorF& hr, const TrainConfig& cfg,
                          TrainState& state);

/// One optimization step on an (lr, hr) batch.
///
/// Generator pass: l1 * L1 + perceptual * perceptual_loss + gan * GAN loss on
/// the discriminator's logits for sr, then Adam on the generator and an EMA
/// update. Discriminator pass on the detached sr: GAN loss, Adam on the
/// discriminator. Terms with zero weight are not computed; with gan == 0 the
/// discriminator is left untouched and may be null. Every discriminator
/// forward during training advances its spectral-norm state.
StepLosses train_step(Generator<float>& gen, Discriminator<float>* disc, const FeatureExtractor<float>& fx,
                      const TensorF& lr, const TensorF& hr, const TrainConfig& cfg, TrainState& state);

/// Degrades each HR image of `hr_batch` with its own stream, derived from
/// (seed, index), and stacks the results.
TensorF synthesize_lr(const TensorF& hr_batch, const DegradationConfig& deg, std::uint64_t seed,
                      std::optional<int> threads = std::nullopt);

/// Random patch_size crop of a random image with a random horizontal flip and
/// 90-degree rotation.
TensorF sample_crop(const std::vector<TensorF>& images, int patch_size, SeededRng& rng);

TensorF stack_batch(const std::vector<TensorF>& items);

// ---- checkpoint naming -------------------------------------------------------
//
// Parameters and buffers keep their model names (generator.*, discriminator.*).
// EMA shadows are stored as "ema.<name>", Adam moments as "adam.m.<name>" and
// "adam.v.<name>"; step counters live in the metadata notes.

void export_training(const Generator<float>& gen, const Discriminator<float>* disc, const TrainState& state,
                     Checkpoint& ckpt);

/// Generator from a checkpoint, using the EMA weights when present.
Generator<float> load_inference_generator(const Checkpoint& ckpt);

// ---- fine-tuning -------------------------------------------------------------

struct FinetuneOptions {
    DegradationConfig degradation = DegradationConfig::defaults();
    /// Used when the input checkpoint carries no discriminator.
    DiscriminatorConfig discriminator;
    /// Replaces the seed-0 feature weights ("features.*" tensors).
    std::optional<std::filesystem::path> feature_weights;
    /// Ignore any training state in the input and start at iteration 0.
    bool restart = false;
    std::optional<int> threads;
    /// Receives one tab-separated line per iteration.
    std::ostream* log = nullptr;
    /// Stop after this iteration (a checkpoint is written there) without
    /// reaching total_iterations; used to split runs.
    std::optional<int> stop_after;
};

struct FinetuneSummary {
    std::int64_t start_iteration = 0;
    std::int64_t end_iteration = 0;
    std::int64_t iterations_run = 0;
    StepLosses last;
    std::vector<std::string> carried_tensors;
    bool discriminator_initialized = false;
};

/// Fine-tunes the generator in `checkpoint_in` on random crops of the PNGs
/// in `dataset_dir`. A checkpoint previously written by this function is
/// resumed at its iteration; any other checkpoint starts a new run. Output
/// is written every save_interval iterations and at the end.
FinetuneSummary finetune(const std::filesystem::path& checkpoint_in, const std::filesystem::path& dataset_dir,
                         const TrainConfig& cfg, const FinetuneOptions& options,
                         const std::filesystem::path& checkpoint_out);

}  // namespace srforge
