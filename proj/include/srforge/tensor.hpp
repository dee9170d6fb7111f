#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace srforge {

/// NCHW extent. Every dimension is at least 1.
struct Shape {
    int n = 1;
    int c = 1;
    int h = 1;
    int w = 1;

    [[nodiscard]] std::size_t numel() const {
        return static_cast<std::size_t>(n) * c * h * w;
    }
    [[nodiscard]] std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
    [[nodiscard]] bool valid() const { return n >= 1 && c >= 1 && h >= 1 && w >= 1; }
    [[nodiscard]] std::string str() const {
        return std::to_string(n) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
               std::to_string(w);
    }
    friend bool operator==(const Shape&, const Shape&) = default;
};

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense row-major NCHW array. Value semantics; copies are deep.
template <typename T>
class Tensor {
public:
    using value_type = T;

    Tensor() : shape_{}, data_(1, T(0)) {}

    explicit Tensor(Shape shape, T fill = T(0)) : shape_(shape) {
        if (!shape.valid()) {
            throw ShapeError("tensor shape must be positive in every dimension, got " + shape.str());
        }
        data_.assign(shape.numel(), fill);
    }

    Tensor(Shape shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
        if (!shape.valid()) {
            throw ShapeError("tensor shape must be positive in every dimension, got " + shape.str());
        }
        if (data_.size() != shape.numel()) {
            throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape.str());
        }
    }

    static Tensor scalar(T v) { return Tensor(Shape{1, 1, 1, 1}, v); }

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] std::size_t numel() const { return data_.size(); }
    [[nodiscard]] int n() const { return shape_.n; }
    [[nodiscard]] int c() const { return shape_.c; }
    [[nodiscard]] int h() const { return shape_.h; }
    [[nodiscard]] int w() const { return shape_.w; }

    [[nodiscard]] std::span<T> data() { return data_; }
    [[nodiscard]] std::span<const T> data() const { return data_; }
    [[nodiscard]] T* ptr() { return data_.data(); }
    [[nodiscard]] const T* ptr() const { return data_.data(); }

    /// Pointer to the (n, c) plane.
    [[nodiscard]] T* plane(int n, int c) { return data_.data() + index(n, c, 0, 0); }
    [[nodiscard]] const T* plane(int n, int c) const { return data_.data() + index(n, c, 0, 0); }

    [[nodiscard]] std::size_t index(int n, int c, int y, int x) const {
        return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + y) * shape_.w + x;
    }
    T& at(int n, int c, int y, int x) { return data_[index(n, c, y, x)]; }
    const T& at(int n, int c, int y, int x) const { return data_[index(n, c, y, x)]; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    /// Scalar value of a one-element tensor.
    [[nodiscard]] T item() const {
        if (data_.size() != 1) {
            throw ShapeError("item() requires a one-element tensor, got " + shape_.str());
        }
        return data_[0];
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    /// Same data viewed with a different shape of equal element count.
    [[nodiscard]] Tensor reshaped(Shape s) const {
        if (s.numel() != numel()) {
            throw ShapeError("cannot reshape " + shape_.str() + " to " + s.str());
        }
        return Tensor(s, data_);
    }

    template <typename U>
    [[nodiscard]] Tensor<U> cast() const {
        std::vector<U> out(data_.size());
        std::transform(data_.begin(), data_.end(), out.begin(),
                       [](T v) { return static_cast<U>(v); });
        return Tensor<U>(shape_, std::move(out));
    }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

private:
    Shape shape_;
    std::vector<T> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

/// Throws ShapeError naming `what` when the shapes differ.
inline void require_same_shape(const Shape& a, const Shape& b, const std::string& what) {
    if (!(a == b)) {
        throw ShapeError(what + ": shape mismatch " + a.str() + " vs " + b.str());
    }
}

template <typename T>
bool all_finite(const Tensor<T>& t) {
    return std::all_of(t.data().begin(), t.data().end(), [](T v) { return std::isfinite(v); });
}

}  // namespace srforge
