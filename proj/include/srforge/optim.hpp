#pragma once

#include <cstdint>
#include <vector>

#include "srforge/autograd.hpp"
#include "srforge/tensor.hpp"

namespace srforge {

struct AdamHyper {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double epsilon = 1e-8;
};

/// First and second moments per parameter plus the step counter.
struct AdamState {
    std::vector<TensorF> m;
    std::vector<TensorF> v;
    std::int64_t step = 0;

    AdamState() = default;
    /// Zero moments shaped like `params`.
    explicit AdamState(const std::vector<Parameter<float>>& params);
};

/// One bias-corrected Adam update from the accumulated `grad` of each
/// parameter. The step counter is incremented first.
void adam_step(std::vector<Parameter<float>>& params, AdamState& state, const AdamHyper& hyper);

/// Shadow copy of a parameter list.
struct EmaState {
    std::vector<TensorF> shadow;
    double decay = 0.999;

    EmaState() = default;
    EmaState(const std::vector<Parameter<float>>& params, double decay);
};

/// shadow <- decay * shadow + (1 - decay) * current, evaluated so that the
/// result always lies between the old shadow and the current value.
void ema_update(EmaState& ema, const std::vector<Parameter<float>>& params);

}  // namespace srforge
