#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "srforge/autograd.hpp"
#include "srforge/networks.hpp"

namespace srforge {

/// Fixed convolutional feature stack for the perceptual loss.
///
/// Five 3x3 convolutions with leaky-ReLU(0.2) between them:
///   conv1 3->16, conv2 16->16, conv3 16->32 (stride 2), conv4 32->32,
///   conv5 32->32.
/// Features are tapped before the activation of conv2 and conv4. Weights are
/// Kaiming-normal from seed 0 unless replaced from a checkpoint; they are
/// never trained.
template <typename T>
class FeatureExtractor : public Model<T> {
public:
    static constexpr std::array<int, 2> kTaps{2, 4};

    explicit FeatureExtractor(std::uint64_t seed = 0);

    /// Pre-activation maps at the tap layers. Weights enter as constants, so
    /// gradients flow only to `x`.
    std::array<Var<T>, 2> features(const Var<T>& x) const;

private:
    std::array<ConvSpec, 5> convs_;
};

/// Sum over taps of the mean absolute difference between the feature maps of
/// `sr` and `hr`. `hr` is treated as a constant.
template <typename T>
Var<T> perceptual_loss(const Var<T>& sr, const Var<T>& hr, const FeatureExtractor<T>& fx);

/// -mean(log sigmoid(fake)).
template <typename T>
Var<T> gan_loss_g(const Var<T>& fake_logits);

/// -mean(log sigmoid(real)) - mean(log(1 - sigmoid(fake))).
template <typename T>
Var<T> gan_loss_d(const Var<T>& real_logits, const Var<T>& fake_logits);

/// Relativistic-average forms: each logit map is compared against the mean
/// of the other. For the generator, `real_logits` should be detached.
template <typename T>
Var<T> relativistic_loss_g(const Var<T>& real_logits, const Var<T>& fake_logits);
template <typename T>
Var<T> relativistic_loss_d(const Var<T>& real_logits, const Var<T>& fake_logits);

}  // namespace srforge
