#include "srforge/autograd.hpp"

namespace srforge {

template <typename T>
Var<T> Tape<T>::make_var(std::shared_ptr<const Tensor<T>> value, int slot) {
    Var<T> v;
    v.value_ = std::move(value);
    v.slot_ = slot;
    v.tape_ = slot >= 0 ? this : nullptr;
    return v;
}

template <typename T>
Var<T> Tape<T>::leaf(Tensor<T> value, bool requires_grad) {
    auto shared = std::make_shared<const Tensor<T>>(std::move(value));
    if (!requires_grad) return make_var(std::move(shared), -1);
    nodes_.push_back(Node{shared->shape(), {}, nullptr, true});
    grads_.emplace_back();
    return make_var(std::move(shared), static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Var<T> Tape<T>::parameter(Parameter<T>& param) {
    // Aliases the parameter storage: the parameter must stay unmodified
    // while this tape is alive.
    std::shared_ptr<const Tensor<T>> shared(std::shared_ptr<void>(), &param.value);
    nodes_.push_back(Node{shared->shape(), {}, &param, true});
    grads_.emplace_back();
    return make_var(std::move(shared), static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, std::initializer_list<const Var<T>*> inputs,
                       BackwardFn fn) {
    return record(std::move(value), std::vector<const Var<T>*>(inputs), std::move(fn));
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, const std::vector<const Var<T>*>& inputs, BackwardFn fn) {
    bool needs = false;
    for (const Var<T>* in : inputs) {
        if (in->requires_grad()) {
            if (in->tape() != this) {
                throw std::logic_error("operation mixes values from different tapes");
            }
            needs = true;
        }
    }
    auto shared = std::make_shared<const Tensor<T>>(std::move(value));
    if (!needs) return make_var(std::move(shared), -1);
    nodes_.push_back(Node{shared->shape(), std::move(fn), nullptr, false});
    grads_.emplace_back();
    return make_var(std::move(shared), static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Tensor<T>* Tape<T>::grad_buffer(int slot) {
    if (slot < 0) return nullptr;
    auto& g = grads_.at(static_cast<std::size_t>(slot));
    if (!g) g.emplace(nodes_[static_cast<std::size_t>(slot)].shape);
    return &*g;
}

template <typename T>
void Tape<T>::backward(const Var<T>& loss, T seed) {
    if (loss.value().numel() != 1) {
        throw ShapeError("backward() requires a scalar loss, got shape " + loss.shape().str());
    }
    if (!loss.requires_grad()) return;
    if (loss.tape() != this) throw std::logic_error("loss was not recorded on this tape");
    grad_buffer(loss.slot())->fill(seed);

    for (int slot = loss.slot(); slot >= 0; --slot) {
        auto& node = nodes_[static_cast<std::size_t>(slot)];
        auto& g = grads_[static_cast<std::size_t>(slot)];
        if (!g) continue;
        if (node.leaf) {
            if (node.param != nullptr) {
                auto dst = node.param->grad.data();
                auto src = g->data();
                for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
            }
            continue;
        }
        node.backward(*this, *g);
        // Interior gradients are no longer needed once propagated.
        g.reset();
    }
}

template <typename T>
Tensor<T> Tape<T>::grad(const Var<T>& v) const {
    if (v.slot() < 0 || v.tape() != this) return Tensor<T>(v.shape());
    const auto& g = grads_[static_cast<std::size_t>(v.slot())];
    return g ? *g : Tensor<T>(v.shape());
}

template class Tape<float>;
template class Tape<double>;

}  // namespace srforge
