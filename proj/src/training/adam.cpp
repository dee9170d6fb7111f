#include <cmath>
#include <stdexcept>

#include "srforge/optim.hpp"

namespace srforge {

namespace {

void check_aligned(const std::vector<Parameter<float>>& params, const std::vector<TensorF>& state, const char* what) {
    if (params.size() != state.size()) throw std::invalid_argument(std::string(what) + ": parameter count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        require_same_shape(params[i].value.shape(), state[i].shape(), std::string(what) + " " + params[i].name);
    }
}

}  // namespace

AdamState::AdamState(const std::vector<Parameter<float>>& params) {
    m.reserve(params.size());
    v.reserve(params.size());
    for (const auto& p : params) {
        m.emplace_back(p.value.shape());
        v.emplace_back(p.value.shape());
    }
}

void adam_step(std::vector<Parameter<float>>& params, AdamState& state, const AdamHyper& hyper) {
    check_aligned(params, state.m, "adam first moment");
    check_aligned(params, state.v, "adam second moment");
    ++state.step;
    const auto t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(hyper.beta1, t);
    const double c2 = 1.0 - std::pow(hyper.beta2, t);
    const auto b1 = static_cast<float>(hyper.beta1);
    const auto b2 = static_cast<float>(hyper.beta2);
    const float a1 = 1.0f - b1;
    const float a2 = 1.0f - b2;
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& p = params[k];
        float* m = state.m[k].ptr();
        float* v = state.v[k].ptr();
        float* theta = p.value.ptr();
        const float* g = p.grad.ptr();
        const std::size_t n = p.value.numel();
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = b1 * m[i] + a1 * g[i];
            v[i] = b2 * v[i] + a2 * g[i] * g[i];
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            theta[i] = static_cast<float>(theta[i] - hyper.learning_rate * mhat / (std::sqrt(vhat) + hyper.epsilon));
        }
    }
}

EmaState::EmaState(const std::vector<Parameter<float>>& params, double d) : decay(d) {
    if (!(decay >= 0.0 && decay <= 1.0)) throw std::invalid_argument("ema decay must lie in [0, 1]");
    shadow.reserve(params.size());
    for (const auto& p : params) shadow.push_back(p.value);
}

void ema_update(EmaState& ema, const std::vector<Parameter<float>>& params) {
    check_aligned(params, ema.shadow, "ema shadow");
    const double rate = 1.0 - ema.decay;
    for (std::size_t k = 0; k < params.size(); ++k) {
        float* s = ema.shadow[k].ptr();
        const float* c = params[k].value.ptr();
        const std::size_t n = ema.shadow[k].numel();
        for (std::size_t i = 0; i < n; ++i) {
            const double old = s[i];
            s[i] = static_cast<float>(old + rate * (static_cast<double>(c[i]) - old));
        }
    }
}

}  // namespace srforge
