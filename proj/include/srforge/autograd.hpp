#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "srforge/tensor.hpp"

namespace srforge {

/// Trainable tensor with its gradient accumulator.
template <typename T>
struct Parameter {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;

    Parameter() = default;
    Parameter(std::string n, Tensor<T> v)
        : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

    void zero_grad() { grad.fill(T(0)); }
};

template <typename T>
class Tape;

/// Handle to a value produced on (or fed into) a Tape. Values are immutable
/// and shared; `slot` is -1 for values that do not require a gradient.
template <typename T>
class Var {
public:
    Var() = default;

    /// Gradient-free value, usable without any tape.
    static Var constant(Tensor<T> t) {
        Var v;
        v.value_ = std::make_shared<const Tensor<T>>(std::move(t));
        return v;
    }

    /// Gradient-free view of `t`, which must outlive every use of the Var.
    static Var borrowed(const Tensor<T>& t) {
        Var v;
        v.value_ = std::shared_ptr<const Tensor<T>>(std::shared_ptr<void>(), &t);
        return v;
    }

    [[nodiscard]] const Tensor<T>& value() const { return *value_; }
    [[nodiscard]] const Shape& shape() const { return value_->shape(); }
    [[nodiscard]] bool requires_grad() const { return slot_ >= 0; }
    [[nodiscard]] int slot() const { return slot_; }
    [[nodiscard]] Tape<T>* tape() const { return tape_; }
    [[nodiscard]] std::shared_ptr<const Tensor<T>> shared() const { return value_; }

    /// Same value, cut off from the graph.
    [[nodiscard]] Var detach() const {
        Var v;
        v.value_ = value_;
        return v;
    }

private:
    friend class Tape<T>;
    std::shared_ptr<const Tensor<T>> value_;
    int slot_ = -1;
    Tape<T>* tape_ = nullptr;
};

/// Records differentiable operations in execution order and replays them in
/// reverse to accumulate gradients. One tape per optimization step.
template <typename T>
class Tape {
public:
    /// Receives the output gradient; accumulates into input gradients via
    /// Tape::grad_buffer.
    using BackwardFn = std::function<void(Tape&, const Tensor<T>& grad_out)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Leaf value; when requires_grad its gradient is available after backward().
    Var<T> leaf(Tensor<T> value, bool requires_grad = true);

    /// Leaf bound to a Parameter; backward() adds into param.grad.
    Var<T> parameter(Parameter<T>& param);

    /// Registers an op result. `inputs` decide whether a node is recorded at all.
    Var<T> record(Tensor<T> value, std::initializer_list<const Var<T>*> inputs, BackwardFn fn);
    Var<T> record(Tensor<T> value, const std::vector<const Var<T>*>& inputs, BackwardFn fn);

    /// Runs reverse accumulation from a one-element loss.
    void backward(const Var<T>& loss, T seed = T(1));

    /// Gradient of a leaf after backward(); zeros if it was unreachable.
    [[nodiscard]] Tensor<T> grad(const Var<T>& v) const;

    /// Mutable zero-initialized accumulator for `slot`; nullptr for slot < 0.
    Tensor<T>* grad_buffer(int slot);

    [[nodiscard]] std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Shape shape;
        BackwardFn backward;
        Parameter<T>* param = nullptr;
        bool leaf = false;
    };

    Var<T> make_var(std::shared_ptr<const Tensor<T>> value, int slot);

    std::vector<Node> nodes_;
    std::vector<std::optional<Tensor<T>>> grads_;
};

/// Tape shared by the inputs of an op, or nullptr when none requires a gradient.
template <typename T>
Tape<T>* tape_of(std::initializer_list<const Var<T>*> vars) {
    for (const Var<T>* v : vars) {
        if (v != nullptr && v->requires_grad()) return v->tape();
    }
    return nullptr;
}

}  // namespace srforge
