#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gpgl/error.hpp"
#include "gpgl/nn/layers.hpp"
#include "gpgl/nn/tensor.hpp"
#include "gpgl/random.hpp"

namespace gpgl::nn {

/// Multi-scale maxout convolution. Branch s chains s + 1 3x3
/// convolutions (receptive field 2s + 3); the layer output is the
/// element-wise maximum over branches. Branches have independent weights.
template <class T>
class MsmConvLayer {
public:
    MsmConvLayer() = default;
    MsmConvLayer(std::size_t in_channels, std::size_t out_channels, std::size_t scales, const std::string& name = "msm")
        : in_(in_channels), out_(out_channels), scales_(scales) {
        if (in_ == 0 || out_ == 0 || scales_ == 0) throw InvalidArgument("MSM-Conv needs positive channels and scales");
        for (std::size_t s = 0; s < scales_; ++s) {
            for (std::size_t d = 0; d <= s; ++d) {
                const auto cin = d == 0 ? in_ : out_;
                const auto tag = name + ".b" + std::to_string(s) + ".c" + std::to_string(d);
                params_.emplace_back(tag + ".kernel", kernel_taps * cin * out_);
                params_.emplace_back(tag + ".bias", out_);
            }
        }
    }

    std::size_t in_channels() const { return in_; }
    std::size_t out_channels() const { return out_; }
    std::size_t scales() const { return scales_; }
    std::size_t depth(std::size_t branch) const { return branch + 1; }

    Parameter<T>& kernel(std::size_t branch, std::size_t d) { return params_[2 * (offset(branch) + d)]; }
    Parameter<T>& bias(std::size_t branch, std::size_t d) { return params_[2 * (offset(branch) + d) + 1]; }
    const Parameter<T>& kernel(std::size_t branch, std::size_t d) const { return params_[2 * (offset(branch) + d)]; }
    const Parameter<T>& bias(std::size_t branch, std::size_t d) const { return params_[2 * (offset(branch) + d) + 1]; }
    std::vector<Parameter<T>>& parameters() { return params_; }
    const std::vector<Parameter<T>>& parameters() const { return params_; }

    /// Uniform fan-in init. Only the last convolution of a branch feeds a
    /// nonlinearity, so the earlier ones use the variance-preserving bound.
    void initialize(Rng& rng) {
        for (std::size_t s = 0; s < scales_; ++s)
            for (std::size_t d = 0; d <= s; ++d) {
                auto& k = kernel(s, d);
                const double fan_in = static_cast<double>(k.value.size() / out_);
                const double bound = std::sqrt((d == s ? 6.0 : 3.0) / fan_in);
                for (auto& w : k.value) w = static_cast<T>(rng.uniform(-bound, bound));
                std::fill(bias(s, d).value.begin(), bias(s, d).value.end(), T(0));
            }
    }

    struct Cache {
        std::vector<std::vector<Tensor4<T>>> inputs;  // inputs[s][d] is the input of conv d in branch s
        std::vector<std::uint8_t> winner;            // branch chosen per output element
    };

    Tensor4<T> branch_forward(const Tensor4<T>& x, std::size_t s, std::vector<Tensor4<T>>* inputs = nullptr) const {
        Tensor4<T> h = x;
        for (std::size_t d = 0; d <= s; ++d) {
            if (inputs) inputs->push_back(h);
            h = conv2d_forward<T>(h, kernel(s, d).value, bias(s, d).value);
        }
        return h;
    }

    Tensor4<T> forward(const Tensor4<T>& x, Cache* cache = nullptr) const {
        if (x.c != in_) throw ShapeMismatch("MSM-Conv expects " + std::to_string(in_) + " input channels, got " + x.shape_string());
        if (cache) {
            cache->inputs.assign(scales_, {});
            cache->winner.clear();
        }
        Tensor4<T> out;
        for (std::size_t s = 0; s < scales_; ++s) {
            auto b = branch_forward(x, s, cache ? &cache->inputs[s] : nullptr);
            if (s == 0) {
                out = std::move(b);
                if (cache) cache->winner.assign(out.size(), 0);
                continue;
            }
            for (std::size_t i = 0; i < out.size(); ++i) {
                if (b.data[i] > out.data[i]) {  // ties keep the lower branch
                    out.data[i] = b.data[i];
                    if (cache) cache->winner[i] = static_cast<std::uint8_t>(s);
                }
            }
        }
        return out;
    }

    /// Routes dy to the winning branch per element, accumulates parameter
    /// gradients and returns dL/dx.
    Tensor4<T> backward(const Cache& cache, const Tensor4<T>& dy) {
        const auto& x = cache.inputs.front().front();
        Tensor4<T> dx(x.n, x.h, x.w, x.c);
        for (std::size_t s = 0; s < scales_; ++s) {
            Tensor4<T> g(dy.n, dy.h, dy.w, dy.c);
            bool any = false;
            for (std::size_t i = 0; i < dy.size(); ++i)
                if (cache.winner[i] == s) {
                    g.data[i] = dy.data[i];
                    any = any || dy.data[i] != T(0);
                }
            if (!any) continue;
            for (std::size_t d = s + 1; d-- > 0;)
                g = conv2d_backward<T>(cache.inputs[s][d], g, kernel(s, d).value, kernel(s, d).grad, bias(s, d).grad);
            for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] += g.data[i];
        }
        return dx;
    }

private:
    std::size_t offset(std::size_t branch) const { return branch * (branch + 1) / 2; }

    std::size_t in_ = 0, out_ = 0, scales_ = 0;
    std::vector<Parameter<T>> params_;
};

template <class T>
Tensor4<T> msm_conv_forward(const Tensor4<T>& x, const MsmConvLayer<T>& layer) {
    return layer.forward(x);
}

}  // namespace gpgl::nn
