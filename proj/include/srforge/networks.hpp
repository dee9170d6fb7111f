#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "srforge/autograd.hpp"
#include "srforge/ops.hpp"
#include "srforge/rng.hpp"
#include "srforge/tensor.hpp"

namespace srforge {

struct GeneratorConfig {
    int in_channels = 3;
    int out_channels = 3;
    int num_features = 64;
    int num_rrdb_blocks = 23;
    int growth_channels = 32;
    int scale = 4;
    double residual_beta = 0.2;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

struct DiscriminatorConfig {
    int in_channels = 3;
    int num_features = 64;
    int spectral_norm_iterations = 1;

    void validate() const;
    friend bool operator==(const DiscriminatorConfig&, const DiscriminatorConfig&) = default;
};

/// Non-trainable named state (spectral-norm vectors).
template <typename T>
struct Buffer {
    std::string name;
    Tensor<T> value;
};

/// Ordered, uniquely named parameters plus buffers. Parameter addresses are
/// stable after construction, which tapes rely on.
template <typename T>
class Model {
public:
    Model() = default;
    Model(const Model&) = default;
    Model& operator=(const Model&) = default;
    Model(Model&&) noexcept = default;
    Model& operator=(Model&&) noexcept = default;
    virtual ~Model() = default;

    [[nodiscard]] std::vector<Parameter<T>>& parameters() { return params_; }
    [[nodiscard]] const std::vector<Parameter<T>>& parameters() const { return params_; }
    [[nodiscard]] std::vector<Buffer<T>>& buffers() { return buffers_; }
    [[nodiscard]] const std::vector<Buffer<T>>& buffers() const { return buffers_; }

    Parameter<T>* find_parameter(const std::string& name);
    Buffer<T>* find_buffer(const std::string& name);

    void zero_grad();

protected:
    int add_parameter(const std::string& name, Shape shape);
    int add_buffer(const std::string& name, Tensor<T> value);

    /// Differentiable handle when `tape` is given, constant view otherwise.
    Var<T> bind(Tape<T>* tape, int index);

    std::vector<Parameter<T>> params_;
    std::vector<Buffer<T>> buffers_;
};

/// Element count over parameters; buffers are excluded.
template <typename T>
std::size_t count_params(const Model<T>& model);

/// Conv layer description: parameter indices into the owning model.
struct ConvSpec {
    int weight = -1;
    int bias = -1;
    int stride = 1;
    int padding = 1;
};

/// RRDB generator. The body always upsamples by 4; scale 2 and 1 models
/// first fold the input with pixel_unshuffle by 2 and 4.
template <typename T>
class Generator : public Model<T> {
public:
    Generator(const GeneratorConfig& config, std::uint64_t seed);

    [[nodiscard]] const GeneratorConfig& config() const { return config_; }

    /// Parameters are recorded on `tape` when non-null.
    Var<T> forward(const Var<T>& lr, Tape<T>* tape = nullptr);

private:
    Var<T> conv(const Var<T>& x, const ConvSpec& c, Tape<T>* tape);
    Var<T> dense_block(const Var<T>& x, const std::array<ConvSpec, 5>& convs, Tape<T>* tape);

    GeneratorConfig config_;
    ConvSpec conv_first_;
    std::vector<std::array<std::array<ConvSpec, 5>, 3>> blocks_;
    ConvSpec conv_body_, conv_up1_, conv_up2_, conv_hr_, conv_last_;
};

/// U-Net discriminator with spectrally normalized convolutions and a
/// per-pixel logit map at input resolution.
template <typename T>
class Discriminator : public Model<T> {
public:
    Discriminator(const DiscriminatorConfig& config, std::uint64_t seed);

    [[nodiscard]] const DiscriminatorConfig& config() const { return config_; }

    /// With `update_spectral_state`, the stored u vectors advance by the
    /// configured number of power iterations before normalizing.
    Var<T> forward(const Var<T>& img, Tape<T>* tape = nullptr, bool update_spectral_state = false);

private:
    Var<T> conv(const Var<T>& x, int layer, Tape<T>* tape, bool update);

    DiscriminatorConfig config_;
    std::array<ConvSpec, 10> convs_;
    std::array<int, 10> u_index_{};
};

template <typename T>
struct SpectralNormResult {
    Tensor<T> weight;
    Tensor<T> u;
    Tensor<T> v;
    T sigma;
};

/// Power iteration on the [out, rest] view of `weight`: `iterations` rounds
/// of v = normalize(W^T u), u = normalize(W v); then sigma = u^T W v and the
/// weight divided by sigma. With zero iterations v is derived from the given
/// u. sigma is floored at 1e-12.
template <typename T>
SpectralNormResult<T> spectral_normalize(const Tensor<T>& weight, const Tensor<T>& u, int iterations);

/// Kaiming-normal fill with fan-in scaling times `gain_scale`.
template <typename T>
void kaiming_fill(Tensor<T>& weight, double gain_scale, SeededRng& rng);

}  // namespace srforge
