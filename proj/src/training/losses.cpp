#include "srforge/losses.hpp"

#include "srforge/ops.hpp"

namespace srforge {

template <typename T>
FeatureExtractor<T>::FeatureExtractor(std::uint64_t seed) {
    struct Layer {
        int cin, cout, stride;
    };
    constexpr std::array<Layer, 5> layers{{{3, 16, 1}, {16, 16, 1}, {16, 32, 2}, {32, 32, 1}, {32, 32, 1}}};
    this->params_.reserve(2 * layers.size());
    SeededRng rng(seed);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const std::string name = "features.conv" + std::to_string(i + 1);
        ConvSpec& c = convs_[i];
        c.weight = this->add_parameter(name + ".weight", Shape{layers[i].cout, layers[i].cin, 3, 3});
        c.bias = this->add_parameter(name + ".bias", Shape{layers[i].cout, 1, 1, 1});
        c.stride = layers[i].stride;
        kaiming_fill(this->params_[static_cast<std::size_t>(c.weight)].value, 1.0, rng);
    }
}

template <typename T>
std::array<Var<T>, 2> FeatureExtractor<T>::features(const Var<T>& x) const {
    std::array<Var<T>, 2> taps;
    Var<T> h = x;
    std::size_t next = 0;
    for (int layer = 1; layer <= kTaps.back(); ++layer) {
        const ConvSpec& c = convs_[static_cast<std::size_t>(layer - 1)];
        const auto& w = this->params_[static_cast<std::size_t>(c.weight)].value;
        const auto& b = this->params_[static_cast<std::size_t>(c.bias)].value;
        Var<T> pre = conv2d(h, Var<T>::borrowed(w), Var<T>::borrowed(b), c.stride, c.padding);
        if (layer == kTaps[next]) taps[next++] = pre;
        h = leaky_relu(pre, T(0.2));
    }
    return taps;
}

template <typename T>
Var<T> perceptual_loss(const Var<T>& sr, const Var<T>& hr, const FeatureExtractor<T>& fx) {
    require_same_shape(sr.shape(), hr.shape(), "perceptual loss");
    const auto fs = fx.features(sr);
    const auto fh = fx.features(hr.detach());
    Var<T> total = mean_abs_diff(fs[0], fh[0].detach());
    for (std::size_t i = 1; i < fs.size(); ++i) total = add(total, mean_abs_diff(fs[i], fh[i].detach()));
    return total;
}

template <typename T>
Var<T> gan_loss_g(const Var<T>& fake_logits) {
    return mean_softplus(scale(fake_logits, T(-1)));
}

template <typename T>
Var<T> gan_loss_d(const Var<T>& real_logits, const Var<T>& fake_logits) {
    return add(mean_softplus(scale(real_logits, T(-1))), mean_softplus(fake_logits));
}

template <typename T>
Var<T> relativistic_loss_g(const Var<T>& real_logits, const Var<T>& fake_logits) {
    const Var<T> real_rel = sub_broadcast(real_logits, mean(fake_logits));
    const Var<T> fake_rel = sub_broadcast(fake_logits, mean(real_logits));
    return add(mean_softplus(real_rel), mean_softplus(scale(fake_rel, T(-1))));
}

template <typename T>
Var<T> relativistic_loss_d(const Var<T>& real_logits, const Var<T>& fake_logits) {
    const Var<T> real_rel = sub_broadcast(real_logits, mean(fake_logits));
    const Var<T> fake_rel = sub_broadcast(fake_logits, mean(real_logits));
    return add(mean_softplus(scale(real_rel, T(-1))), mean_softplus(fake_rel));
}

#define SRFORGE_INSTANTIATE(T)                                                                   \
    template class FeatureExtractor<T>;                                                          \
    template Var<T> perceptual_loss(const Var<T>&, const Var<T>&, const FeatureExtractor<T>&);   \
    template Var<T> gan_loss_g(const Var<T>&);                                                   \
    template Var<T> gan_loss_d(const Var<T>&, const Var<T>&);                                    \
    template Var<T> relativistic_loss_g(const Var<T>&, const Var<T>&);                           \
    template Var<T> relativistic_loss_d(const Var<T>&, const Var<T>&);

SRFORGE_INSTANTIATE(float)
SRFORGE_INSTANTIATE(double)

#undef SRFORGE_INSTANTIATE

}  // namespace srforge
