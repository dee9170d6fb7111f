#pragma once

// Central finite-difference checker for the double-precision path.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "srforge/autograd.hpp"
#include "srforge/ops.hpp"
#include "srforge/rng.hpp"

namespace srforge::testing {

using GradFn = std::function<Var<double>(const std::vector<Var<double>>&)>;

inline TensorD random_tensor(Shape s, SeededRng& rng, double lo = -1.0, double hi = 1.0) {
    TensorD t(s);
    for (double& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

/// Values in [lo, hi] with random sign, keeping clear of the origin.
inline TensorD away_from_zero(Shape s, SeededRng& rng, double lo = 0.1, double hi = 1.0) {
    TensorD t(s);
    for (double& v : t.data()) v = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(lo, hi);
    return t;
}

inline double rel_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

/// Projects f's output onto a fixed random direction r and compares the tape
/// gradient of <f(x), r> with central differences for every input element.
inline double max_grad_error(const GradFn& f, const std::vector<TensorD>& inputs, std::uint64_t seed = 7,
                             double step = 1e-4) {
    std::vector<Var<double>> consts;
    for (const auto& t : inputs) consts.push_back(Var<double>::constant(t));
    const TensorD probe_shape_out = f(consts).value();
    SeededRng rng(seed);
    const TensorD r = random_tensor(probe_shape_out.shape(), rng);

    auto objective = [&](const std::vector<TensorD>& xs) {
        std::vector<Var<double>> vs;
        for (const auto& t : xs) vs.push_back(Var<double>::constant(t));
        const TensorD out = f(vs).value();
        double acc = 0.0;
        for (std::size_t i = 0; i < out.numel(); ++i) acc += out[i] * r[i];
        return acc;
    };

    Tape<double> tape;
    std::vector<Var<double>> leaves;
    for (const auto& t : inputs) leaves.push_back(tape.leaf(t));
    Var<double> loss = sum(mul(f(leaves), Var<double>::constant(r)));
    tape.backward(loss);

    double worst = 0.0;
    std::vector<TensorD> xs = inputs;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const TensorD g = tape.grad(leaves[k]);
        for (std::size_t i = 0; i < xs[k].numel(); ++i) {
            const double orig = xs[k][i];
            xs[k][i] = orig + step;
            const double up = objective(xs);
            xs[k][i] = orig - step;
            const double down = objective(xs);
            xs[k][i] = orig;
            worst = std::max(worst, rel_error(g[i], (up - down) / (2.0 * step)));
        }
    }
    return worst;
}

}  // namespace srforge::testing

namespace srforge::testing {

/// Central difference of `f` along one coordinate. Piecewise-linear models
/// make the two one-sided slopes disagree only when the stencil straddles a
/// leaky_relu kink; the step shrinks until they agree (or reaches 1e-8).
template <typename Eval>
double kink_aware_difference(double& coord, Eval f, double step) {
    const double orig = coord;
    const double mid = f();
    double estimate = 0.0;
    for (double h = step; h >= 1e-8; h /= 10.0) {
        coord = orig + h;
        const double up = f();
        coord = orig - h;
        const double down = f();
        coord = orig;
        const double fwd = (up - mid) / h, bwd = (mid - down) / h;
        estimate = (up - down) / (2.0 * h);
        if (std::abs(fwd - bwd) <= 1e-4 * std::max({std::abs(fwd), std::abs(bwd), 1e-3})) break;
    }
    return estimate;
}

/// Tape gradients of <f(params, x), r> w.r.t. model parameters and the input,
/// against central differences. `per_tensor` entries of each parameter are
/// probed at seeded positions; every input element is probed.
template <typename Model, typename Forward>
double max_model_grad_error(Model& model, Forward forward, const TensorD& input, int per_tensor,
                            std::uint64_t seed = 17, double step = 1e-4) {
    SeededRng rng(seed);
    const TensorD probe = forward(model, nullptr, Var<double>::constant(input)).value();
    const TensorD r = random_tensor(probe.shape(), rng);
    TensorD xs = input;
    auto objective = [&] {
        const TensorD out = forward(model, nullptr, Var<double>::constant(xs)).value();
        double acc = 0.0;
        for (std::size_t i = 0; i < out.numel(); ++i) acc += out[i] * r[i];
        return acc;
    };

    model.zero_grad();
    Tape<double> tape;
    Var<double> x = tape.leaf(input);
    tape.backward(sum(mul(forward(model, &tape, x), Var<double>::constant(r))));
    const TensorD gx = tape.grad(x);

    double worst = 0.0;
    for (std::size_t i = 0; i < xs.numel(); ++i) {
        worst = std::max(worst, rel_error(gx[i], kink_aware_difference(xs[i], objective, step)));
    }
    for (auto& p : model.parameters()) {
        for (int k = 0; k < per_tensor; ++k) {
            const std::size_t i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(p.value.numel()) - 1));
            worst = std::max(worst, rel_error(p.grad[i], kink_aware_difference(p.value[i], objective, step)));
        }
    }
    return worst;
}

}  // namespace srforge::testing
