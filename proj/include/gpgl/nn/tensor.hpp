#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gpgl/error.hpp"

namespace gpgl::nn {

/// Storage for anything handed to Eigen. Vectorized reductions peel a
/// prefix that depends on the start address, so a fixed alignment keeps
/// floating-point results bit-identical from run to run.
template <class T>
using Buffer = std::vector<T, Eigen::aligned_allocator<T>>;

/// Dense batch of feature maps, [n][h][w][c] (row-major, channel-last).
template <class T>
struct Tensor4 {
    std::size_t n = 0, h = 0, w = 0, c = 0;
    Buffer<T> data;

    Tensor4() = default;
    Tensor4(std::size_t n_, std::size_t h_, std::size_t w_, std::size_t c_, T fill = T(0))
        : n(n_), h(h_), w(w_), c(c_), data(n_ * h_ * w_ * c_, fill) {}

    std::size_t size() const { return data.size(); }
    std::size_t pixels() const { return n * h * w; }

    T& operator()(std::size_t b, std::size_t y, std::size_t x, std::size_t ch) { return data[((b * h + y) * w + x) * c + ch]; }
    T operator()(std::size_t b, std::size_t y, std::size_t x, std::size_t ch) const {
        return data[((b * h + y) * w + x) * c + ch];
    }

    bool same_shape(const Tensor4& o) const { return n == o.n && h == o.h && w == o.w && c == o.c; }
    std::string shape_string() const {
        return "[" + std::to_string(n) + "x" + std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c) + "]";
    }
};

/// Row-major [rows][cols] matrix used for fully connected activations.
template <class T>
struct Matrix {
    std::size_t rows = 0, cols = 0;
    Buffer<T> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, T fill = T(0)) : rows(r), cols(c), data(r * c, fill) {}
    T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    T operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// A learnable block: values and the gradient accumulated by backward().
template <class T>
struct Parameter {
    std::string name;
    Buffer<T> value;
    Buffer<T> grad;

    Parameter() = default;
    Parameter(std::string n, std::size_t size) : name(std::move(n)), value(size, T(0)), grad(size, T(0)) {}
    void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
};

}  // namespace gpgl::nn
