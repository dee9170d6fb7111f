#include <stdexcept>
#include <string>

#include "srforge/networks.hpp"
#include "srforge/parallel.hpp"

namespace srforge {

void GeneratorConfig::validate() const {
    auto positive = [](int v, const char* name) {
        if (v < 1) throw std::invalid_argument(std::string("generator: ") + name + " must be >= 1, got " + std::to_string(v));
    };
    positive(in_channels, "in_channels");
    positive(out_channels, "out_channels");
    positive(num_features, "num_features");
    positive(num_rrdb_blocks, "num_rrdb_blocks");
    positive(growth_channels, "growth_channels");
    if (scale != 1 && scale != 2 && scale != 4) {
        throw std::invalid_argument("generator: scale must be 1, 2 or 4, got " + std::to_string(scale));
    }
    if (!(residual_beta >= 0.0)) throw std::invalid_argument("generator: residual_beta must be >= 0");
}

namespace {

/// Input fold applied before the x4 body.
int fold_factor(int scale) { return scale == 4 ? 1 : 4 / scale; }

}  // namespace

template <typename T>
Generator<T>::Generator(const GeneratorConfig& config, std::uint64_t seed) : config_(config) {
    config_.validate();
    const int f = config_.num_features;
    const int g = config_.growth_channels;
    const int fold = fold_factor(config_.scale);
    const std::string root = "generator.";

    std::size_t count = 2 * (5 + static_cast<std::size_t>(config_.num_rrdb_blocks) * 15);
    this->params_.reserve(count);

    auto make = [&](const std::string& name, int cin, int cout) {
        ConvSpec c;
        c.weight = this->add_parameter(root + name + ".weight", Shape{cout, cin, 3, 3});
        c.bias = this->add_parameter(root + name + ".bias", Shape{cout, 1, 1, 1});
        return c;
    };

    conv_first_ = make("conv_first", config_.in_channels * fold * fold, f);
    blocks_.resize(static_cast<std::size_t>(config_.num_rrdb_blocks));
    for (int b = 0; b < config_.num_rrdb_blocks; ++b) {
        for (int r = 0; r < 3; ++r) {
            auto& convs = blocks_[static_cast<std::size_t>(b)][static_cast<std::size_t>(r)];
            const std::string prefix = "body." + std::to_string(b) + ".rdb" + std::to_string(r + 1) + ".conv";
            for (int k = 0; k < 5; ++k) {
                const int cout = k == 4 ? f : g;
                convs[static_cast<std::size_t>(k)] = make(prefix + std::to_string(k + 1), f + k * g, cout);
            }
        }
    }
    conv_body_ = make("conv_body", f, f);
    conv_up1_ = make("conv_up1", f, f);
    conv_up2_ = make("conv_up2", f, f);
    conv_hr_ = make("conv_hr", f, f);
    conv_last_ = make("conv_last", f, config_.out_channels);

    // One stream per parameter tensor so the fill can run in parallel.
    auto& params = this->params_;
    parallel_for(params.size(), resolve_threads(), [&](std::size_t i) {
        if (params[i].value.h() <= 1) return;
        SeededRng rng = SeededRng::for_item(seed, i);
        kaiming_fill(params[i].value, 0.1, rng);
    });
}

template <typename T>
Var<T> Generator<T>::conv(const Var<T>& x, const ConvSpec& c, Tape<T>* tape) {
    return conv2d(x, this->bind(tape, c.weight), this->bind(tape, c.bias), c.stride, c.padding);
}

template <typename T>
Var<T> Generator<T>::dense_block(const Var<T>& x, const std::array<ConvSpec, 5>& convs, Tape<T>* tape) {
    std::vector<Var<T>> feats{x};
    for (std::size_t k = 0; k < 4; ++k) {
        Var<T> in = feats.size() == 1 ? x : concat_channels(feats);
        feats.push_back(leaky_relu(conv(in, convs[k], tape), T(0.2)));
    }
    Var<T> x5 = conv(concat_channels(feats), convs[4], tape);
    return add_scaled(x, x5, static_cast<T>(config_.residual_beta));
}

template <typename T>
Var<T> Generator<T>::forward(const Var<T>& lr, Tape<T>* tape) {
    const Shape s = lr.shape();
    if (s.c != config_.in_channels) {
        throw ShapeError("generator: expected " + std::to_string(config_.in_channels) + " input channels, got " +
                         s.str());
    }
    const int fold = fold_factor(config_.scale);
    Var<T> x = lr;
    if (fold > 1) {
        if (s.h % fold != 0 || s.w % fold != 0) {
            throw ShapeError("generator: scale " + std::to_string(config_.scale) + " needs height and width divisible by " +
                             std::to_string(fold) + ", got " + s.str());
        }
        x = pixel_unshuffle(x, fold);
    }
    const T beta = static_cast<T>(config_.residual_beta);
    Var<T> feat = conv(x, conv_first_, tape);
    Var<T> body = feat;
    for (const auto& rrdb : blocks_) {
        Var<T> y = body;
        for (const auto& rdb : rrdb) y = dense_block(y, rdb, tape);
        body = add_scaled(body, y, beta);
    }
    feat = add(feat, conv(body, conv_body_, tape));
    feat = leaky_relu(conv(nearest_upsample(feat, 2), conv_up1_, tape), T(0.2));
    feat = leaky_relu(conv(nearest_upsample(feat, 2), conv_up2_, tape), T(0.2));
    return conv(leaky_relu(conv(feat, conv_hr_, tape), T(0.2)), conv_last_, tape);
}

template class Generator<float>;
template class Generator<double>;

}  // namespace srforge
