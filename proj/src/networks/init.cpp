#include <cmath>
#include <stdexcept>

#include "srforge/networks.hpp"

namespace srforge {

template <typename T>
Parameter<T>* Model<T>::find_parameter(const std::string& name) {
    for (auto& p : params_) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

template <typename T>
Buffer<T>* Model<T>::find_buffer(const std::string& name) {
    for (auto& b : buffers_) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

template <typename T>
void Model<T>::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

template <typename T>
int Model<T>::add_parameter(const std::string& name, Shape shape) {
    if (find_parameter(name) != nullptr) throw std::logic_error("duplicate parameter name " + name);
    params_.emplace_back(name, Tensor<T>(shape));
    return static_cast<int>(params_.size()) - 1;
}

template <typename T>
int Model<T>::add_buffer(const std::string& name, Tensor<T> value) {
    if (find_buffer(name) != nullptr) throw std::logic_error("duplicate buffer name " + name);
    buffers_.push_back(Buffer<T>{name, std::move(value)});
    return static_cast<int>(buffers_.size()) - 1;
}

template <typename T>
Var<T> Model<T>::bind(Tape<T>* tape, int index) {
    Parameter<T>& p = params_[static_cast<std::size_t>(index)];
    return tape != nullptr ? tape->parameter(p) : Var<T>::borrowed(p.value);
}

template <typename T>
std::size_t count_params(const Model<T>& model) {
    std::size_t total = 0;
    for (const auto& p : model.parameters()) total += p.value.numel();
    return total;
}

template <typename T>
void kaiming_fill(Tensor<T>& weight, double gain_scale, SeededRng& rng) {
    const std::size_t fan_in = weight.numel() / static_cast<std::size_t>(weight.n());
    const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in)) * gain_scale;
    rng.fill_normal(weight.data(), std_dev);
}

template class Model<float>;
template class Model<double>;
template std::size_t count_params<float>(const Model<float>&);
template std::size_t count_params<double>(const Model<double>&);
template void kaiming_fill<float>(Tensor<float>&, double, SeededRng&);
template void kaiming_fill<double>(Tensor<double>&, double, SeededRng&);

}  // namespace srforge
