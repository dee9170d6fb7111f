#include <cmath>
#include <stdexcept>
#include <string>

#include "srforge/networks.hpp"

namespace srforge {

void DiscriminatorConfig::validate() const {
    if (in_channels < 1) throw std::invalid_argument("discriminator: in_channels must be >= 1");
    if (num_features < 1) throw std::invalid_argument("discriminator: num_features must be >= 1");
    if (spectral_norm_iterations < 0) {
        throw std::invalid_argument("discriminator: spectral_norm_iterations must be >= 0");
    }
}

template <typename T>
Discriminator<T>::Discriminator(const DiscriminatorConfig& config, std::uint64_t seed) : config_(config) {
    config_.validate();
    const int f = config_.num_features;
    struct Layer {
        int cin, cout, k, stride, padding;
        bool bias;
    };
    const std::array<Layer, 10> layers{{
        {config_.in_channels, f, 3, 1, 1, true},
        {f, 2 * f, 4, 2, 1, false},
        {2 * f, 4 * f, 4, 2, 1, false},
        {4 * f, 8 * f, 4, 2, 1, false},
        {8 * f, 4 * f, 3, 1, 1, false},
        {4 * f, 2 * f, 3, 1, 1, false},
        {2 * f, f, 3, 1, 1, false},
        {f, f, 3, 1, 1, false},
        {f, f, 3, 1, 1, false},
        {f, 1, 3, 1, 1, true},
    }};
    this->params_.reserve(12);
    SeededRng rng(seed);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& l = layers[i];
        const std::string name = "discriminator.conv" + std::to_string(i);
        ConvSpec& c = convs_[i];
        c.weight = this->add_parameter(name + ".weight", Shape{l.cout, l.cin, l.k, l.k});
        if (l.bias) c.bias = this->add_parameter(name + ".bias", Shape{l.cout, 1, 1, 1});
        c.stride = l.stride;
        c.padding = l.padding;
        kaiming_fill(this->params_[static_cast<std::size_t>(c.weight)].value, 1.0, rng);

        Tensor<T> u(Shape{l.cout, 1, 1, 1});
        double norm = 0.0;
        std::vector<double> draws(static_cast<std::size_t>(l.cout));
        for (double& d : draws) {
            d = rng.normal();
            norm += d * d;
        }
        norm = std::max(std::sqrt(norm), 1e-12);
        for (std::size_t r = 0; r < draws.size(); ++r) u[r] = static_cast<T>(draws[r] / norm);
        u_index_[i] = this->add_buffer(name + ".weight_u", std::move(u));
    }
}

template <typename T>
Var<T> Discriminator<T>::conv(const Var<T>& x, int layer, Tape<T>* tape, bool update) {
    const ConvSpec& c = convs_[static_cast<std::size_t>(layer)];
    Parameter<T>& w = this->params_[static_cast<std::size_t>(c.weight)];
    Tensor<T>& u = this->buffers_[static_cast<std::size_t>(u_index_[static_cast<std::size_t>(layer)])].value;
    auto sn = spectral_normalize(w.value, u, update ? config_.spectral_norm_iterations : 0);
    if (update) u = sn.u;
    Var<T> weight = spectral_divide(this->bind(tape, c.weight), sn.u, sn.v);
    if (c.bias >= 0) return conv2d(x, weight, this->bind(tape, c.bias), c.stride, c.padding);
    return conv2d(x, weight, c.stride, c.padding);
}

template <typename T>
Var<T> Discriminator<T>::forward(const Var<T>& img, Tape<T>* tape, bool update_spectral_state) {
    const Shape s = img.shape();
    if (s.c != config_.in_channels) {
        throw ShapeError("discriminator: expected " + std::to_string(config_.in_channels) + " channels, got " + s.str());
    }
    if (s.h % 8 != 0 || s.w % 8 != 0) {
        throw ShapeError("discriminator: height and width must be divisible by 8, got " + s.str());
    }
    const bool up = update_spectral_state;
    const T slope(0.2);
    Var<T> x0 = leaky_relu(conv(img, 0, tape, up), slope);
    Var<T> x1 = leaky_relu(conv(x0, 1, tape, up), slope);
    Var<T> x2 = leaky_relu(conv(x1, 2, tape, up), slope);
    Var<T> x3 = leaky_relu(conv(x2, 3, tape, up), slope);

    Var<T> x4 = add(leaky_relu(conv(bilinear_upsample(x3, 2), 4, tape, up), slope), x2);
    Var<T> x5 = add(leaky_relu(conv(bilinear_upsample(x4, 2), 5, tape, up), slope), x1);
    Var<T> x6 = add(leaky_relu(conv(bilinear_upsample(x5, 2), 6, tape, up), slope), x0);

    Var<T> out = leaky_relu(conv(x6, 7, tape, up), slope);
    out = leaky_relu(conv(out, 8, tape, up), slope);
    return conv(out, 9, tape, up);
}

template class Discriminator<float>;
template class Discriminator<double>;

}  // namespace srforge
