#pragma once

// Stateless forward/backward kernels. Convolutions are 3x3, stride 1,
// zero "same" padding, computed as cross-correlation (no kernel flip)
// through im2col and a GEMM.
//
// Kernel layout: row (ky * 3 + kx) * in_channels + ci, column co, i.e. a
// (9 * Cin) x Cout row-major matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gpgl/error.hpp"
#include "gpgl/nn/tensor.hpp"
#include "gpgl/random.hpp"

namespace gpgl::nn {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MapMat = Eigen::Map<RowMat<T>>;
template <class T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

inline constexpr std::size_t kernel_taps = 9;

template <class T>
void im2col(const Tensor4<T>& x, RowMat<T>& cols) {
    const auto ch = x.c;
    cols.setZero(static_cast<Eigen::Index>(x.pixels()), static_cast<Eigen::Index>(kernel_taps * ch));
    for (std::size_t b = 0; b < x.n; ++b) {
        for (std::size_t y = 0; y < x.h; ++y) {
            for (std::size_t xx = 0; xx < x.w; ++xx) {
                T* row = cols.data() + ((b * x.h + y) * x.w + xx) * kernel_taps * ch;
                for (int ky = 0; ky < 3; ++ky) {
                    const long sy = static_cast<long>(y) + ky - 1;
                    if (sy < 0 || sy >= static_cast<long>(x.h)) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                        const long sx = static_cast<long>(xx) + kx - 1;
                        if (sx < 0 || sx >= static_cast<long>(x.w)) continue;
                        const T* src = &x.data[((b * x.h + static_cast<std::size_t>(sy)) * x.w + static_cast<std::size_t>(sx)) * ch];
                        std::copy(src, src + ch, row + static_cast<std::size_t>(ky * 3 + kx) * ch);
                    }
                }
            }
        }
    }
}

template <class T>
void col2im_add(const RowMat<T>& cols, Tensor4<T>& dx) {
    const auto ch = dx.c;
    for (std::size_t b = 0; b < dx.n; ++b) {
        for (std::size_t y = 0; y < dx.h; ++y) {
            for (std::size_t xx = 0; xx < dx.w; ++xx) {
                const T* row = cols.data() + ((b * dx.h + y) * dx.w + xx) * kernel_taps * ch;
                for (int ky = 0; ky < 3; ++ky) {
                    const long sy = static_cast<long>(y) + ky - 1;
                    if (sy < 0 || sy >= static_cast<long>(dx.h)) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                        const long sx = static_cast<long>(xx) + kx - 1;
                        if (sx < 0 || sx >= static_cast<long>(dx.w)) continue;
                        T* dst = &dx.data[((b * dx.h + static_cast<std::size_t>(sy)) * dx.w + static_cast<std::size_t>(sx)) * ch];
                        const T* src = row + static_cast<std::size_t>(ky * 3 + kx) * ch;
                        for (std::size_t c = 0; c < ch; ++c) dst[c] += src[c];
                    }
                }
            }
        }
    }
}

/// 3x3 same-padded convolution. kernel has 9 * x.c * out_channels
/// entries, bias has out_channels.
template <class T>
Tensor4<T> conv2d_forward(const Tensor4<T>& x, std::span<const T> kernel, std::span<const T> bias) {
    const auto out_c = bias.size();
    if (out_c == 0 || kernel.size() != kernel_taps * x.c * out_c)
        throw ShapeMismatch("conv2d kernel size " + std::to_string(kernel.size()) + " does not match input " +
                            x.shape_string() + " and " + std::to_string(out_c) + " output channels");
    RowMat<T> cols;
    im2col(x, cols);
    Tensor4<T> y(x.n, x.h, x.w, out_c);
    MapMat<T> ym(y.data.data(), static_cast<Eigen::Index>(x.pixels()), static_cast<Eigen::Index>(out_c));
    ConstMapMat<T> km(kernel.data(), static_cast<Eigen::Index>(kernel_taps * x.c), static_cast<Eigen::Index>(out_c));
    ym.noalias() = cols * km;
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bm(bias.data(), static_cast<Eigen::Index>(out_c));
    ym.rowwise() += bm;
    return y;
}

/// Accumulates kernel/bias gradients and returns dL/dx.
template <class T>
Tensor4<T> conv2d_backward(const Tensor4<T>& x, const Tensor4<T>& dy, std::span<const T> kernel, std::span<T> dkernel,
                           std::span<T> dbias) {
    const auto out_c = dy.c;
    RowMat<T> cols;
    im2col(x, cols);
    ConstMapMat<T> dym(dy.data.data(), static_cast<Eigen::Index>(dy.pixels()), static_cast<Eigen::Index>(out_c));
    MapMat<T> dkm(dkernel.data(), static_cast<Eigen::Index>(kernel_taps * x.c), static_cast<Eigen::Index>(out_c));
    dkm.noalias() += cols.transpose() * dym;
    Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> dbm(dbias.data(), static_cast<Eigen::Index>(out_c));
    dbm += dym.colwise().sum();
    ConstMapMat<T> km(kernel.data(), static_cast<Eigen::Index>(kernel_taps * x.c), static_cast<Eigen::Index>(out_c));
    RowMat<T> dcols = dym * km.transpose();
    Tensor4<T> dx(x.n, x.h, x.w, x.c);
    col2im_add(dcols, dx);
    return dx;
}

// ---------------------------------------------------------------------------
// pooling

/// 2x2, stride 2. Odd sizes round up; the missing cells act as -inf.
/// argmax receives, per output element, the flat input index chosen.
template <class T>
Tensor4<T> max_pool2_forward(const Tensor4<T>& x, std::vector<std::size_t>* argmax = nullptr) {
    const auto oh = (x.h + 1) / 2, ow = (x.w + 1) / 2;
    Tensor4<T> y(x.n, oh, ow, x.c);
    if (argmax) argmax->assign(y.size(), 0);
    for (std::size_t b = 0; b < x.n; ++b)
        for (std::size_t oy = 0; oy < oh; ++oy)
            for (std::size_t ox = 0; ox < ow; ++ox)
                for (std::size_t c = 0; c < x.c; ++c) {
                    T best = -std::numeric_limits<T>::infinity();
                    std::size_t where = 0;
                    for (std::size_t dy = 0; dy < 2; ++dy)
                        for (std::size_t dx = 0; dx < 2; ++dx) {
                            const auto iy = 2 * oy + dy, ix = 2 * ox + dx;
                            if (iy >= x.h || ix >= x.w) continue;
                            const auto idx = ((b * x.h + iy) * x.w + ix) * x.c + c;
                            if (x.data[idx] > best) {
                                best = x.data[idx];
                                where = idx;
                            }
                        }
                    const auto o = ((b * oh + oy) * ow + ox) * x.c + c;
                    y.data[o] = best;
                    if (argmax) (*argmax)[o] = where;
                }
    return y;
}

template <class T>
Tensor4<T> max_pool2_backward(const Tensor4<T>& x_shape, const Tensor4<T>& dy, const std::vector<std::size_t>& argmax) {
    Tensor4<T> dx(x_shape.n, x_shape.h, x_shape.w, x_shape.c);
    for (std::size_t o = 0; o < dy.size(); ++o) dx.data[argmax[o]] += dy.data[o];
    return dx;
}

enum class GlobalPool { max, mean };

/// Per-channel spatial reduction to an [n][c] matrix.
template <class T>
Matrix<T> global_pool_forward(const Tensor4<T>& x, GlobalPool kind, std::vector<std::size_t>* argmax = nullptr) {
    Matrix<T> y(x.n, x.c);
    if (argmax) argmax->assign(x.n * x.c, 0);
    const auto hw = x.h * x.w;
    for (std::size_t b = 0; b < x.n; ++b)
        for (std::size_t c = 0; c < x.c; ++c) {
            if (kind == GlobalPool::mean) {
                T s = 0;
                for (std::size_t p = 0; p < hw; ++p) s += x.data[(b * hw + p) * x.c + c];
                y(b, c) = s / static_cast<T>(hw);
            } else {
                T best = -std::numeric_limits<T>::infinity();
                std::size_t where = 0;
                for (std::size_t p = 0; p < hw; ++p) {
                    const auto idx = (b * hw + p) * x.c + c;
                    if (x.data[idx] > best) {
                        best = x.data[idx];
                        where = idx;
                    }
                }
                y(b, c) = best;
                if (argmax) (*argmax)[b * x.c + c] = where;
            }
        }
    return y;
}

template <class T>
Tensor4<T> global_pool_backward(const Tensor4<T>& x_shape, const Matrix<T>& dy, GlobalPool kind,
                                const std::vector<std::size_t>& argmax) {
    Tensor4<T> dx(x_shape.n, x_shape.h, x_shape.w, x_shape.c);
    const auto hw = dx.h * dx.w;
    for (std::size_t b = 0; b < dx.n; ++b)
        for (std::size_t c = 0; c < dx.c; ++c) {
            if (kind == GlobalPool::mean) {
                const T g = dy(b, c) / static_cast<T>(hw);
                for (std::size_t p = 0; p < hw; ++p) dx.data[(b * hw + p) * dx.c + c] += g;
            } else {
                dx.data[argmax[b * dx.c + c]] += dy(b, c);
            }
        }
    return dx;
}

// ---------------------------------------------------------------------------
// fully connected, activations, loss

/// y = x W + b with W stored [in][out].
template <class T>
Matrix<T> dense_forward(const Matrix<T>& x, std::span<const T> weight, std::span<const T> bias) {
    const auto out = bias.size();
    if (weight.size() != x.cols * out) throw ShapeMismatch("dense weight does not match input width");
    Matrix<T> y(x.rows, out);
    ConstMapMat<T> xm(x.data.data(), static_cast<Eigen::Index>(x.rows), static_cast<Eigen::Index>(x.cols));
    ConstMapMat<T> wm(weight.data(), static_cast<Eigen::Index>(x.cols), static_cast<Eigen::Index>(out));
    MapMat<T> ym(y.data.data(), static_cast<Eigen::Index>(x.rows), static_cast<Eigen::Index>(out));
    ym.noalias() = xm * wm;
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bm(bias.data(), static_cast<Eigen::Index>(out));
    ym.rowwise() += bm;
    return y;
}

template <class T>
Matrix<T> dense_backward(const Matrix<T>& x, const Matrix<T>& dy, std::span<const T> weight, std::span<T> dweight,
                         std::span<T> dbias) {
    ConstMapMat<T> xm(x.data.data(), static_cast<Eigen::Index>(x.rows), static_cast<Eigen::Index>(x.cols));
    ConstMapMat<T> dym(dy.data.data(), static_cast<Eigen::Index>(dy.rows), static_cast<Eigen::Index>(dy.cols));
    MapMat<T> dwm(dweight.data(), static_cast<Eigen::Index>(x.cols), static_cast<Eigen::Index>(dy.cols));
    dwm.noalias() += xm.transpose() * dym;
    Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> dbm(dbias.data(), static_cast<Eigen::Index>(dy.cols));
    dbm += dym.colwise().sum();
    ConstMapMat<T> wm(weight.data(), static_cast<Eigen::Index>(x.cols), static_cast<Eigen::Index>(dy.cols));
    Matrix<T> dx(x.rows, x.cols);
    MapMat<T> dxm(dx.data.data(), static_cast<Eigen::Index>(x.rows), static_cast<Eigen::Index>(x.cols));
    dxm.noalias() = dym * wm.transpose();
    return dx;
}

template <class T>
void relu_inplace(Buffer<T>& v) {
    for (auto& x : v) x = x > T(0) ? x : T(0);
}

// Zeroes dy where the forward output was not positive.
template <class T>
void relu_backward_inplace(const Buffer<T>& out, Buffer<T>& dy) {
    for (std::size_t i = 0; i < dy.size(); ++i)
        if (!(out[i] > T(0))) dy[i] = T(0);
}

/// Inverted dropout: kept units are scaled by 1 / (1 - ratio). mask
/// receives the per-unit multiplier.
template <class T>
void dropout_inplace(Buffer<T>& v, double ratio, Rng& rng, Buffer<T>& mask) {
    mask.assign(v.size(), T(1));
    if (ratio <= 0.0) return;
    const T scale = static_cast<T>(1.0 / (1.0 - ratio));
    for (std::size_t i = 0; i < v.size(); ++i) {
        mask[i] = rng.uniform() < ratio ? T(0) : scale;
        v[i] *= mask[i];
    }
}

/// Mean softmax cross-entropy over the batch; probs receives the softmax.
template <class T>
T softmax_cross_entropy(const Matrix<T>& logits, std::span<const int> labels, Matrix<T>& probs) {
    probs = Matrix<T>(logits.rows, logits.cols);
    T total = 0;
    for (std::size_t r = 0; r < logits.rows; ++r) {
        T m = -std::numeric_limits<T>::infinity();
        for (std::size_t c = 0; c < logits.cols; ++c) m = std::max(m, logits(r, c));
        T z = 0;
        for (std::size_t c = 0; c < logits.cols; ++c) z += std::exp(logits(r, c) - m);
        for (std::size_t c = 0; c < logits.cols; ++c) probs(r, c) = std::exp(logits(r, c) - m) / z;
        total += -(logits(r, static_cast<std::size_t>(labels[r])) - m - std::log(z));
    }
    return total / static_cast<T>(logits.rows);
}

}  // namespace gpgl::nn
