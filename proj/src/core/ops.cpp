#include "srforge/ops.hpp"

#include <cmath>
#include <string>

#include "conv_kernels.hpp"

namespace srforge {

namespace {

template <typename T>
Var<T> finish(Tensor<T> out, std::initializer_list<const Var<T>*> inputs,
              typename Tape<T>::BackwardFn fn) {
    Tape<T>* tape = tape_of<T>(inputs);
    if (tape == nullptr) return Var<T>::constant(std::move(out));
    return tape->record(std::move(out), inputs, std::move(fn));
}

template <typename T>
void accumulate(Tensor<T>* dst, const Tensor<T>& src, T factor = T(1)) {
    if (dst == nullptr) return;
    auto d = dst->data();
    auto s = src.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += factor * s[i];
}

template <typename T>
Var<T> conv2d_impl(const Var<T>& input, const Var<T>& weight, const Var<T>* bias, int stride,
                   int padding) {
    const Shape& is = input.shape();
    const Shape& ws = weight.shape();
    if (stride < 1) throw std::invalid_argument("conv2d: stride must be positive");
    if (padding < 0) throw std::invalid_argument("conv2d: padding must be non-negative");
    if (ws.c != is.c) {
        throw ShapeError("conv2d: weight expects " + std::to_string(ws.c) +
                         " input channels but input has " + std::to_string(is.c) + " (input " +
                         is.str() + ", weight " + ws.str() + ")");
    }
    if (ws.h > is.h + 2 * padding || ws.w > is.w + 2 * padding) {
        throw ShapeError("conv2d: kernel " + std::to_string(ws.h) + "x" + std::to_string(ws.w) +
                         " exceeds padded input " + std::to_string(is.h + 2 * padding) + "x" +
                         std::to_string(is.w + 2 * padding));
    }
    if (bias != nullptr && bias->value().numel() != static_cast<std::size_t>(ws.n)) {
        throw ShapeError("conv2d: bias has " + std::to_string(bias->value().numel()) +
                         " elements for " + std::to_string(ws.n) + " output channels");
    }
    detail::ConvGeometry g{is.c,
                           is.h,
                           is.w,
                           ws.n,
                           (is.h + 2 * padding - ws.h) / stride + 1,
                           (is.w + 2 * padding - ws.w) / stride + 1,
                           ws.h,
                           ws.w,
                           stride,
                           padding};
    Tensor<T> out(Shape{is.n, g.out_c, g.out_h, g.out_w});
    detail::conv2d_forward(input.value().ptr(), weight.value().ptr(),
                           bias != nullptr ? bias->value().ptr() : nullptr, g, is.n, out.ptr());

    Var<T> b = bias != nullptr ? *bias : Var<T>();
    auto fn = [input, weight, b, g](Tape<T>& tape, const Tensor<T>& gout) {
        Tensor<T>* gi = tape.grad_buffer(input.slot());
        Tensor<T>* gw = tape.grad_buffer(weight.slot());
        Tensor<T>* gb = b.shared() ? tape.grad_buffer(b.slot()) : nullptr;
        detail::conv2d_backward(input.value().ptr(), weight.value().ptr(), gout.ptr(), g,
                                input.shape().n, gi != nullptr ? gi->ptr() : nullptr,
                                gw != nullptr ? gw->ptr() : nullptr,
                                gb != nullptr ? gb->ptr() : nullptr);
    };
    if (bias != nullptr) return finish<T>(std::move(out), {&input, &weight, bias}, fn);
    return finish<T>(std::move(out), {&input, &weight}, fn);
}

}  // namespace

template <typename T>
Var<T> conv2d(const Var<T>& input, const Var<T>& weight, int stride, int padding) {
    return conv2d_impl<T>(input, weight, nullptr, stride, padding);
}

template <typename T>
Var<T> conv2d(const Var<T>& input, const Var<T>& weight, const Var<T>& bias, int stride,
              int padding) {
    return conv2d_impl(input, weight, &bias, stride, padding);
}

template <typename T>
Var<T> leaky_relu(const Var<T>& x, T slope) {
    if (!(slope >= T(0) && slope < T(1))) {
        throw std::invalid_argument("leaky_relu: slope must lie in [0, 1)");
    }
    Tensor<T> out(x.shape());
    auto in = x.value().data();
    auto o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = in[i] >= T(0) ? in[i] : slope * in[i];
    return finish<T>(std::move(out), {&x}, [x, slope](Tape<T>& tape, const Tensor<T>& gout) {
        Tensor<T>* gx = tape.grad_buffer(x.slot());
        auto in = x.value().data();
        auto g = gout.data();
        auto d = gx->data();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += in[i] >= T(0) ? g[i] : slope * g[i];
    });
}

template <typename T>
Var<T> nearest_upsample(const Var<T>& x, int factor) {
    if (factor < 1) throw std::invalid_argument("nearest_upsample: factor must be >= 1");
    const Shape s = x.shape();
    Tensor<T> out(Shape{s.n, s.c, s.h * factor, s.w * factor});
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            const T* src = x.value().plane(n, c);
            T* dst = out.plane(n, c);
            const int ow = s.w * factor;
            for (int oy = 0; oy < s.h * factor; ++oy) {
                const T* row = src + static_cast<std::size_t>(oy / factor) * s.w;
                T* drow = dst + static_cast<std::size_t>(oy) * ow;
                for (int ox = 0; ox < ow; ++ox) drow[ox] = row[ox / factor];
            }
        }
    }
    return finish<T>(std::move(out), {&x}, [x, factor](Tape<T>& tape, const Tensor<T>& gout) {
        Tensor<T>* gx = tape.grad_buffer(x.slot());
        const Shape s = x.shape();
        const int ow = s.w * factor;
        for (int n = 0; n < s.n; ++n) {
            for (int c = 0; c < s.c; ++c) {
                const T* src = gout.plane(n, c);
                T* dst = gx->plane(n, c);
                for (int oy = 0; oy < s.h * factor; ++oy) {
                    T* drow = dst + static_cast<std::size_t>(oy / factor) * s.w;
                    const T* row = src + static_cast<std::size_t>(oy) * ow;
                    for (int ox = 0; ox < ow; ++ox) drow[ox / factor] += row[ox];
                }
            }
        }
    });
}

namespace {

struct LinearTap {
    int i0, i1;
    double w1;  // weight of i1; i0 gets 1 - w1
};

std::vector<LinearTap> bilinear_taps(int in, int factor) {
    std::vector<LinearTap> taps(static_cast<std::size_t>(in) * factor);
    for (int o = 0; o < in * factor; ++o) {
        double src = (o + 0.5) / factor - 0.5;
        if (src < 0) src = 0;
        int i0 = static_cast<int>(std::floor(src));
        if (i0 > in - 1) i0 = in - 1;
        const int i1 = std::min(i0 + 1, in - 1);
        taps[static_cast<std::size_t>(o)] = {i0, i1, src - i0};
    }
    return taps;
}

}  // namespace

template <typename T>
Var<T> bilinear_upsample(const Var<T>& x, int factor) {
    if (factor < 1) throw std::invalid_argument("bilinear_upsample: factor must be >= 1");
    const Shape s = x.shape();
    const int oh = s.h * factor;
    const int ow = s.w * factor;
    const auto ty = bilinear_taps(s.h, factor);
    const auto tx = bilinear_taps(s.w, factor);
    Tensor<T> out(Shape{s.n, s.c, oh, ow});
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            const T* src = x.value().plane(n, c);
            T* dst = out.plane(n, c);
            for (int oy = 0; oy < oh; ++oy) {
                const auto& a = ty[static_cast<std::size_t>(oy)];
                const T* r0 = src + static_cast<std::size_t>(a.i0) * s.w;
                const T* r1 = src + static_cast<std::size_t>(a.i1) * s.w;
                const T wy1 = static_cast<T>(a.w1);
                const T wy0 = T(1) - wy1;
                for (int ox = 0; ox < ow; ++ox) {
                    const auto& b = tx[static_cast<std::size_t>(ox)];
                    const T wx1 = static_cast<T>(b.w1);
                    const T wx0 = T(1) - wx1;
                    dst[static_cast<std::size_t>(oy) * ow + ox] =
                        wy0 * (wx0 * r0[b.i0] + wx1 * r0[b.i1]) +
                        wy1 * (wx0 * r1[b.i0] + wx1 * r1[b.i1]);
                }
            }
        }
    }
    return finish<T>(std::move(out), {&x}, [x, factor, ty, tx](Tape<T>& tape,
                                                                const Tensor<T>& gout) {
        Tensor<T>* gx = tape.grad_buffer(x.slot());
        const Shape s = x.shape();
        const int oh = s.h * factor;
        const int ow = s.w * factor;
        for (int n = 0; n < s.n; ++n) {
            for (int c = 0; c < s.c; ++c) {
                const T* g = gout.plane(n, c);
                T* dst = gx->plane(n, c);
                for (int oy = 0; oy < oh; ++oy) {
                    const auto& a = ty[static_cast<std::size_t>(oy)];
                    T* r0 = dst + static_cast<std::size_t>(a.i0) * s.w;
                    T* r1 = dst + static_cast<std::size_t>(a.i1) * s.w;
                    const T wy1 = static_cast<T>(a.w1);
                    const T wy0 = T(1) - wy1;
                    for (int ox = 0; ox < ow; ++ox) {
                        const auto& b = tx[static_cast<std::size_t>(ox)];
                        const T wx1 = static_cast<T>(b.w1);
                        const T wx0 = T(1) - wx1;
                        const T v = g[static_cast<std::size_t>(oy) * ow + ox];
                        r0[b.i0] += wy0 * wx0 * v;
                        r0[b.i1] += wy0 * wx1 * v;
                        r1[b.i0] += wy1 * wx0 * v;
                        r1[b.i1] += wy1 * wx1 * v;
                    }
                }
            }
        }
    });
}

namespace {

// Index of the unshuffled element for input (n, c, y, x).
template <typename T>
void unshuffle_copy(const Tensor<T>& in, Tensor<T>& out, int f, bool forward) {
    const Shape s = forward ? in.shape() : out.shape();  // spatial (large) layout
    for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
            for (int y = 0; y < s.h; ++y) {
                for (int x = 0; x < s.w; ++x) {
                    const int oc = c * f * f + (y % f) * f + (x % f);
                    if (forward) {
                        out.at(n, oc, y / f, x / f) = in.at(n, c, y, x);
                    } else {
                        out.at(n, c, y, x) = in.at(n, oc, y / f, x / f);
                    }
                }
            }
        }
    }
}

}  // namespace

template <typename T>
Var<T> pixel_unshuffle(const Var<T>& x, int factor) {
    if (factor < 1) throw std::invalid_argument("pixel_unshuffle: factor must be >= 1");
    const Shape s = x.shape();
    if (s.h % factor != 0 || s.w % factor != 0) {
        throw ShapeError("pixel_unshuffle: spatial size " + std::to_string(s.h) + "x" +
                         std::to_string(s.w) + " is not divisible by " + std::to_string(factor));
    }
    Tensor<T> out(Shape{s.n, s.c * factor * factor, s.h / factor, s.w / factor});
    unshuffle_copy(x.value(), out, factor, true);
    return finish<T>(std::move(out), {&x}, [x, factor](Tape<T>& tape, const Tensor<T>& gout) {
        Tensor<T> back(x.shape());
        unshuffle_copy(gout, back, factor, false);
        accumulate(tape.grad_buffer(x.slot()), back);
    });
}

template <typename T>
Var<T> pixel_shuffle(const Var<T>& x, int factor) {
    if (factor < 1) throw std::invalid_argument("pixel_shuffle: factor must be >= 1");
    const Shape s = x.shape();
    if (s.c % (factor * factor) != 0) {
        throw ShapeError("pixel_shuffle: channels " + std::to_string(s.c) +
                         " not divisible by " + std::to_string(factor * factor));
    }
    Tensor<T> out(Shape{s.n, s.c / (factor * factor), s.h * factor, s.w * factor});
    unshuffle_copy(x.value(), out, factor, false);
    return finish<T>(std::move(out), {&x}, [x, factor](Tape<T>& tape, const Tensor<T>& gout) {
        Tensor<T> back(x.shape());
        unshuffle_copy(gout, back, factor, true);
        accumulate(tape.grad_buffer(x.slot()), back);
    });
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
    require_same_shape(a.shape(), b.shape(), "add");
    Tensor<T> out(a.shape());
    auto o = out.data();
    auto av = a.value().data();
    auto bv = b.value().data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] + bv[i];
    return finish<T>(std::move(out), {&a, &b}, [a, b](Tape<T>& tape, const Tensor<T>& g) {
        accumulate(tape.grad_buffer(a.slot()), g);
        accumulate(tape.grad_buffer(b.slot()), g);
    });
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
    require_same_shape(a.shape(), b.shape(), "sub");
    Tensor<T> out(a.shape());
    auto o = out.data();
    auto av = a.value().data();
    auto bv = b.value().data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] - bv[i];
    return finish<T>(std::move(out), {&a, &b}, [a, b](Tape<T>& tape, const Tensor<T>& g) {
        accumulate(tape.grad_buffer(a.slot()), g);
        accumulate(tape.grad_buffer(b.slot()), g, T(-1));
    });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
    require_same_shape(a.shape(), b.shape(), "mul");
    Tensor<T> out(a.shape());
    auto o = out.data();
    auto av = a.value().data();
    auto bv = b.value().data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] * bv[i];
    return finish<T>(std::move(out), {&a, &b}, [a, b](Tape<T>& tape, const Tensor<T>& g) {
        auto gv = g.data();
        if (Tensor<T>* ga = tape.grad_buffer(a.slot())) {
            auto d = ga->data();
            auto bv = b.value().data();
            for (std::size_t i = 0; i < d.size(); ++i) d[i] += gv[i] * bv[i];
        }
        if (Tensor<T>* gb = tape.grad_buffer(b.slot())) {
            auto d = gb->data();
            auto av = a.value().data();
            for (std::size_t i = 0; i < d.size(); ++i) d[i] += gv[i] * av[i];
        }
    });
}

template <typename T>
Var<T> scale(const Var<T>& a, T factor) {
    Tensor<T> out(a.shape());
    auto o = out.data();
    auto av = a.value().data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = factor * av[i];
    return finish<T>(std::move(out), {&a}, [a, factor](Tape<T>& tape, const Tensor<T>& g) {
        accumulate(tape.grad_buffer(a.slot()), g, factor);
    });
}

template <typename T>
Var<T> add_scalar(const Var<T>& a, T offset) {
    Tensor<T> out(a.shape());
    auto o = out.data();
    auto av = a.value().data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] + offset;
    return finish<T>(std::move(out), {&a}, [a](Tape<T>& tape, const Tensor<T>& g) {
        accumulate(tape.grad_buffer(a.slot()), g);
    });
}

template <typename T>
Var<T> sub_broadcast(const Var<T>& a, const Var<T>& s) {
    if (s.value().numel() != 1) {
        throw ShapeError("sub_broadcast: subtrahend must have one element, got " + s.shape().str());
    }
    const T sv = s.value()[0];
    Tensor<T> out(a.shape());
    auto o = out.data();
    auto av = a.value().data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] - sv;
    return finish<T>(std::move(out), {&a, &s}, [a, s](Tape<T>& tape, const Tensor<T>& g) {
        accumulate(tape.grad_buffer(a.slot()), g);
        if (Tensor<T>* gs = tape.grad_buffer(s.slot())) {
            T acc = T(0);
            for (T v : g.data()) acc += v;
            (*gs)[0] -= acc;
        }
    });
}

template <typename T>
Var<T> add_scaled(const Var<T>& a, const Var<T>& b, T factor) {
    require_same_shape(a.shape(), b.shape(), "add_scaled");
    Tensor<T> out(a.shape());
    auto o = out.data();
    auto av = a.value().data();
    auto bv = b.value().data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] + factor * bv[i];
    return finish<T>(std::move(out), {&a, &b}, [a, b, factor](Tape<T>& tape, const Tensor<T>& g) {
        accumulate(tape.grad_buffer(a.slot()), g);
        accumulate(tape.grad_buffer(b.slot()), g, factor);
    });
}

template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_channels: no inputs");
    const Shape first = parts.front().shape();
    int channels = 0;
    for (const auto& p : parts) {
        const Shape& s = p.shape();
        if (s.n != first.n || s.h != first.h || s.w != first.w) {
            throw ShapeError("concat_channels: " + s.str() + " does not match " + first.str() +
                             " outside the channel dimension");
        }
        channels += s.c;
    }
    Tensor<T> out(Shape{first.n, channels, first.h, first.w});
    const std::size_t plane = first.plane();
    for (int n = 0; n < first.n; ++n) {
        int c0 = 0;
        for (const auto& p : parts) {
            const int c = p.shape().c;
            std::copy_n(p.value().plane(n, 0), c * plane, out.plane(n, c0));
            c0 += c;
        }
    }
    Tape<T>* tape = nullptr;
    for (const auto& p : parts) {
        if (p.requires_grad()) {
            tape = p.tape();
            break;
        }
    }
    if (tape == nullptr) return Var<T>::constant(std::move(out));
    std::vector<const Var<T>*> inputs;
    for (const auto& p : parts) inputs.push_back(&p);
    return tape->record(std::move(out), inputs, [parts](Tape<T>& tape, const Tensor<T>& g) {
        const Shape s = g.shape();
        const std::size_t plane = s.plane();
        int c0 = 0;
        for (const auto& p : parts) {
            const int c = p.shape().c;
            if (Tensor<T>* gp = tape.grad_buffer(p.slot())) {
                for (int n = 0; n < s.n; ++n) {
                    const T* src = g.plane(n, c0);
                    T* dst = gp->plane(n, 0);
                    for (std::size_t i = 0; i < c * plane; ++i) dst[i] += src[i];
                }
            }
            c0 += c;
        }
    });
}

template <typename T>
Var<T> mean_abs_diff(const Var<T>& a, const Var<T>& b) {
    require_same_shape(a.shape(), b.shape(), "mean_abs_diff");
    auto av = a.value().data();
    auto bv = b.value().data();
    double acc = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) acc += std::abs(static_cast<double>(av[i]) - bv[i]);
    const double n = static_cast<double>(av.size());
    return finish<T>(Tensor<T>::scalar(static_cast<T>(acc / n)), {&a, &b},
                     [a, b](Tape<T>& tape, const Tensor<T>& g) {
                         const T scale = g[0] / static_cast<T>(a.value().numel());
                         auto av = a.value().data();
                         auto bv = b.value().data();
                         Tensor<T>* ga = tape.grad_buffer(a.slot());
                         Tensor<T>* gb = tape.grad_buffer(b.slot());
                         for (std::size_t i = 0; i < av.size(); ++i) {
                             const T d = av[i] - bv[i];
                             const T s = d > T(0) ? scale : (d < T(0) ? -scale : T(0));
                             if (ga) (*ga)[i] += s;
                             if (gb) (*gb)[i] -= s;
                         }
                     });
}

template <typename T>
Var<T> sum(const Var<T>& x) {
    double acc = 0.0;
    for (T v : x.value().data()) acc += v;
    return finish<T>(Tensor<T>::scalar(static_cast<T>(acc)), {&x},
                     [x](Tape<T>& tape, const Tensor<T>& g) {
                         Tensor<T>* gx = tape.grad_buffer(x.slot());
                         for (T& v : gx->data()) v += g[0];
                     });
}

template <typename T>
Var<T> mean(const Var<T>& x) {
    double acc = 0.0;
    for (T v : x.value().data()) acc += v;
    const double n = static_cast<double>(x.value().numel());
    return finish<T>(Tensor<T>::scalar(static_cast<T>(acc / n)), {&x},
                     [x](Tape<T>& tape, const Tensor<T>& g) {
                         Tensor<T>* gx = tape.grad_buffer(x.slot());
                         const T s = g[0] / static_cast<T>(x.value().numel());
                         for (T& v : gx->data()) v += s;
                     });
}

template <typename T>
Var<T> mean_softplus(const Var<T>& x) {
    double acc = 0.0;
    for (T v : x.value().data()) {
        const double d = v;
        acc += std::max(d, 0.0) + std::log1p(std::exp(-std::abs(d)));
    }
    const double n = static_cast<double>(x.value().numel());
    return finish<T>(Tensor<T>::scalar(static_cast<T>(acc / n)), {&x},
                     [x](Tape<T>& tape, const Tensor<T>& g) {
                         Tensor<T>* gx = tape.grad_buffer(x.slot());
                         const T s = g[0] / static_cast<T>(x.value().numel());
                         auto in = x.value().data();
                         auto d = gx->data();
                         for (std::size_t i = 0; i < d.size(); ++i) {
                             // logistic sigmoid, stable for large |x|
                             const T v = in[i];
                             const T e = std::exp(-std::abs(v));
                             const T sig = v >= T(0) ? T(1) / (T(1) + e) : e / (T(1) + e);
                             d[i] += s * sig;
                         }
                     });
}

template <typename T>
Var<T> spectral_divide(const Var<T>& weight, const Tensor<T>& u, const Tensor<T>& v,
                       T* sigma_out) {
    const Shape ws = weight.shape();
    const std::size_t rows = static_cast<std::size_t>(ws.n);
    const std::size_t cols = weight.value().numel() / rows;
    if (u.numel() != rows || v.numel() != cols) {
        throw ShapeError("spectral_divide: u/v sizes " + std::to_string(u.numel()) + "/" +
                         std::to_string(v.numel()) + " do not match weight " + ws.str());
    }
    const T* w = weight.value().ptr();
    double sigma = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        double row = 0.0;
        for (std::size_t c = 0; c < cols; ++c) row += static_cast<double>(w[r * cols + c]) * v[c];
        sigma += static_cast<double>(u[r]) * row;
    }
    sigma = std::max(sigma, 1e-12);
    if (sigma_out != nullptr) *sigma_out = static_cast<T>(sigma);
    const T inv = static_cast<T>(1.0 / sigma);
    Tensor<T> out(ws);
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = w[i] * inv;

    return finish<T>(std::move(out), {&weight},
                     [weight, u, v, sigma](Tape<T>& tape, const Tensor<T>& g) {
                         Tensor<T>* gw = tape.grad_buffer(weight.slot());
                         const Tensor<T>& wv = weight.value();
                         const std::size_t rows = static_cast<std::size_t>(wv.n());
                         const std::size_t cols = wv.numel() / rows;
                         double gdotw = 0.0;
                         for (std::size_t i = 0; i < wv.numel(); ++i) {
                             gdotw += static_cast<double>(g[i]) * wv[i];
                         }
                         const T a = static_cast<T>(1.0 / sigma);
                         const T b = static_cast<T>(gdotw / (sigma * sigma));
                         for (std::size_t r = 0; r < rows; ++r) {
                             for (std::size_t c = 0; c < cols; ++c) {
                                 const std::size_t i = r * cols + c;
                                 (*gw)[i] += a * g[i] - b * u[r] * v[c];
                             }
                         }
                     });
}

#define SRFORGE_INSTANTIATE_OPS(T)                                                          \
    template Var<T> conv2d<T>(const Var<T>&, const Var<T>&, int, int);                      \
    template Var<T> conv2d<T>(const Var<T>&, const Var<T>&, const Var<T>&, int, int);       \
    template Var<T> leaky_relu<T>(const Var<T>&, T);                                        \
    template Var<T> nearest_upsample<T>(const Var<T>&, int);                                \
    template Var<T> bilinear_upsample<T>(const Var<T>&, int);                               \
    template Var<T> pixel_unshuffle<T>(const Var<T>&, int);                                 \
    template Var<T> pixel_shuffle<T>(const Var<T>&, int);                                   \
    template Var<T> add<T>(const Var<T>&, const Var<T>&);                                   \
    template Var<T> sub<T>(const Var<T>&, const Var<T>&);                                   \
    template Var<T> mul<T>(const Var<T>&, const Var<T>&);                                   \
    template Var<T> scale<T>(const Var<T>&, T);                                             \
    template Var<T> add_scalar<T>(const Var<T>&, T);                                        \
    template Var<T> sub_broadcast<T>(const Var<T>&, const Var<T>&);                         \
    template Var<T> add_scaled<T>(const Var<T>&, const Var<T>&, T);                         \
    template Var<T> concat_channels<T>(const std::vector<Var<T>>&);                         \
    template Var<T> mean_abs_diff<T>(const Var<T>&, const Var<T>&);                         \
    template Var<T> mean<T>(const Var<T>&);                                                 \
    template Var<T> sum<T>(const Var<T>&);                                                  \
    template Var<T> mean_softplus<T>(const Var<T>&);                                        \
    template Var<T> spectral_divide<T>(const Var<T>&, const Tensor<T>&, const Tensor<T>&, T*);

SRFORGE_INSTANTIATE_OPS(float)
SRFORGE_INSTANTIATE_OPS(double)

#undef SRFORGE_INSTANTIATE_OPS

}  // namespace srforge
