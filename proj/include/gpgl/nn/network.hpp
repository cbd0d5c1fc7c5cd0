#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpgl/error.hpp"
#include "gpgl/nn/layers.hpp"
#include "gpgl/nn/msm_conv.hpp"
#include "gpgl/nn/tensor.hpp"
#include "gpgl/random.hpp"

namespace gpgl::nn {

/// Layer plan and optimizer settings. Stages are
///   MSM-Conv(conv_channels[i]) -> ReLU -> max-pool     (all but the last)
///   MSM-Conv(conv_channels.back()) -> ReLU -> global pool
/// followed by FC(fc[j]) -> ReLU -> dropout and a final FC(classes).
struct NetworkConfig {
    std::size_t input_height = 64;
    std::size_t input_width = 64;
    std::size_t input_channels = 1;
    std::size_t classes = 2;
    std::vector<std::size_t> conv_channels{64, 128, 256};
    std::vector<std::size_t> fc{256, 128};
    std::size_t scales = 3;
    GlobalPool global_pool = GlobalPool::max;
    double dropout = 0.3;

    // Adam
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 10;

    int epochs = 100;
    int patience = 10;  // early-stopping patience in epochs; 0 disables
    std::uint64_t seed = 0;

    void validate() const {
        if (input_height == 0 || input_width == 0 || input_channels == 0) throw InvalidArgument("input dims must be positive");
        if (classes < 2) throw InvalidArgument("need at least two classes");
        if (conv_channels.empty()) throw InvalidArgument("need at least one MSM-Conv stage");
        for (auto c : conv_channels)
            if (c == 0) throw InvalidArgument("channel counts must be positive");
        for (auto c : fc)
            if (c == 0) throw InvalidArgument("channel counts must be positive");
        if (scales == 0) throw InvalidArgument("scales must be positive");
        if (!(dropout >= 0.0 && dropout < 1.0)) throw InvalidArgument("dropout must lie in [0, 1)");
        if (!(learning_rate >= 0.0)) throw InvalidArgument("learning rate must be non-negative");
        if (batch_size == 0) throw InvalidArgument("batch size must be positive");
        if (epochs < 0) throw InvalidArgument("epochs must be non-negative");
    }
};

inline nlohmann::ordered_json to_json(const NetworkConfig& c) {
    return {{"input_height", c.input_height}, {"input_width", c.input_width},
            {"input_channels", c.input_channels}, {"classes", c.classes},
            {"conv_channels", c.conv_channels}, {"fc", c.fc},
            {"scales", c.scales}, {"global_pool", c.global_pool == GlobalPool::max ? "max" : "mean"},
            {"dropout", c.dropout}, {"learning_rate", c.learning_rate},
            {"beta1", c.beta1}, {"beta2", c.beta2}, {"epsilon", c.epsilon},
            {"batch_size", c.batch_size}, {"epochs", c.epochs}, {"patience", c.patience}, {"seed", c.seed}};
}

inline NetworkConfig network_config_from_json(const nlohmann::json& j) {
    NetworkConfig c;
    c.input_height = j.at("input_height");
    c.input_width = j.at("input_width");
    c.input_channels = j.at("input_channels");
    c.classes = j.at("classes");
    c.conv_channels = j.at("conv_channels").get<std::vector<std::size_t>>();
    c.fc = j.at("fc").get<std::vector<std::size_t>>();
    c.scales = j.at("scales");
    c.global_pool = j.at("global_pool").get<std::string>() == "mean" ? GlobalPool::mean : GlobalPool::max;
    c.dropout = j.at("dropout");
    c.learning_rate = j.at("learning_rate");
    c.beta1 = j.at("beta1");
    c.beta2 = j.at("beta2");
    c.epsilon = j.at("epsilon");
    c.batch_size = j.at("batch_size");
    c.epochs = j.at("epochs");
    c.patience = j.at("patience");
    c.seed = j.at("seed");
    return c;
}

template <class T>
class Network {
public:
    Network() = default;

    explicit Network(const NetworkConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        std::size_t in = cfg_.input_channels;
        for (std::size_t i = 0; i < cfg_.conv_channels.size(); ++i) {
            convs_.emplace_back(in, cfg_.conv_channels[i], cfg_.scales, "msm" + std::to_string(i));
            in = cfg_.conv_channels[i];
        }
        std::vector<std::size_t> widths = cfg_.fc;
        widths.push_back(cfg_.classes);
        for (std::size_t j = 0; j < widths.size(); ++j) {
            dense_w_.emplace_back("fc" + std::to_string(j) + ".weight", in * widths[j]);
            dense_b_.emplace_back("fc" + std::to_string(j) + ".bias", widths[j]);
            in = widths[j];
        }
        Rng rng(cfg_.seed);
        for (auto& c : convs_) c.initialize(rng);
        for (std::size_t j = 0; j < dense_w_.size(); ++j) {
            const double fan_in = static_cast<double>(dense_w_[j].value.size() / dense_b_[j].value.size());
            const double bound = std::sqrt(6.0 / fan_in);
            for (auto& w : dense_w_[j].value) w = static_cast<T>(rng.uniform(-bound, bound));
        }
    }

    const NetworkConfig& config() const { return cfg_; }
    std::vector<MsmConvLayer<T>>& conv_layers() { return convs_; }

    /// Every learnable block in declaration order (conv stages, then FC).
    std::vector<Parameter<T>*> parameters() {
        std::vector<Parameter<T>*> out;
        for (auto& c : convs_)
            for (auto& p : c.parameters()) out.push_back(&p);
        for (std::size_t j = 0; j < dense_w_.size(); ++j) {
            out.push_back(&dense_w_[j]);
            out.push_back(&dense_b_[j]);
        }
        return out;
    }

    std::size_t parameter_count() {
        std::size_t n = 0;
        for (auto* p : parameters()) n += p->value.size();
        return n;
    }

    void zero_grad() {
        for (auto* p : parameters()) p->zero_grad();
    }

    /// Logits for a batch. When `rng` is given the pass is a training pass:
    /// dropout is sampled and everything backward() needs is cached.
    Matrix<T> forward(const Tensor4<T>& x, Rng* rng = nullptr) {
        if (x.h != cfg_.input_height || x.w != cfg_.input_width || x.c != cfg_.input_channels)
            throw ShapeMismatch("network expects [n x " + std::to_string(cfg_.input_height) + "x" +
                                std::to_string(cfg_.input_width) + "x" + std::to_string(cfg_.input_channels) +
                                "], got " + x.shape_string());
        const bool train = rng != nullptr;
        cache_.stages.assign(convs_.size(), {});
        Tensor4<T> h = x;
        for (std::size_t i = 0; i < convs_.size(); ++i) {
            auto& st = cache_.stages[i];
            h = convs_[i].forward(h, train ? &st.msm : nullptr);
            relu_inplace(h.data);
            if (train) st.activation = h;
            if (i + 1 < convs_.size()) h = max_pool2_forward(h, train ? &st.pool_argmax : nullptr);
        }
        Matrix<T> f = global_pool_forward(h, cfg_.global_pool, train ? &cache_.global_argmax : nullptr);
        cache_.dense_in.clear();
        cache_.dense_out.clear();
        cache_.masks.clear();
        for (std::size_t j = 0; j < dense_w_.size(); ++j) {
            if (train) cache_.dense_in.push_back(f);
            f = dense_forward<T>(f, dense_w_[j].value, dense_b_[j].value);
            if (j + 1 < dense_w_.size()) {
                relu_inplace(f.data);
                if (train) {
                    cache_.dense_out.push_back(f);  // post-ReLU, pre-dropout
                    Buffer<T> mask;
                    dropout_inplace(f.data, cfg_.dropout, *rng, mask);
                    cache_.masks.push_back(std::move(mask));
                }
            }
        }
        cache_.valid = train;
        return f;
    }

    /// Accumulates parameter gradients given dL/dlogits from the last
    /// training forward pass.
    void backward(Matrix<T> dlogits) {
        if (!cache_.valid) throw InvalidArgument("backward() needs a preceding training forward pass");
        Matrix<T> g = std::move(dlogits);
        for (std::size_t j = dense_w_.size(); j-- > 0;) {
            if (j + 1 < dense_w_.size()) {
                for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] *= cache_.masks[j][i];
                relu_backward_inplace(cache_.dense_out[j].data, g.data);
            }
            g = dense_backward<T>(cache_.dense_in[j], g, dense_w_[j].value, dense_w_[j].grad, dense_b_[j].grad);
        }
        const auto& last_act = cache_.stages.back().activation;
        Tensor4<T> d = global_pool_backward(last_act, g, cfg_.global_pool, cache_.global_argmax);
        for (std::size_t i = convs_.size(); i-- > 0;) {
            auto& st = cache_.stages[i];
            if (i + 1 < convs_.size()) d = max_pool2_backward(st.activation, d, st.pool_argmax);
            relu_backward_inplace(st.activation.data, d.data);
            d = convs_[i].backward(st.msm, d);
        }
        cache_.valid = false;
    }

    /// Mean cross-entropy of a batch; with `rng` also runs backward.
    T loss_and_backward(const Tensor4<T>& x, std::span<const int> labels, Rng* rng) {
        Matrix<T> probs;
        const auto logits = forward(x, rng);
        const T loss = softmax_cross_entropy(logits, labels, probs);
        if (rng) {
            for (std::size_t r = 0; r < probs.rows; ++r) {
                probs(r, static_cast<std::size_t>(labels[r])) -= T(1);
                for (std::size_t c = 0; c < probs.cols; ++c) probs(r, c) /= static_cast<T>(probs.rows);
            }
            backward(std::move(probs));
        }
        return loss;
    }

private:
    struct StageCache {
        typename MsmConvLayer<T>::Cache msm;
        Tensor4<T> activation;  // post-ReLU, pre-pool
        std::vector<std::size_t> pool_argmax;
    };
    struct Cache {
        std::vector<StageCache> stages;
        std::vector<std::size_t> global_argmax;
        std::vector<Matrix<T>> dense_in;
        std::vector<Matrix<T>> dense_out;
        std::vector<Buffer<T>> masks;
        bool valid = false;
    };

    NetworkConfig cfg_;
    std::vector<MsmConvLayer<T>> convs_;
    std::vector<Parameter<T>> dense_w_;
    std::vector<Parameter<T>> dense_b_;
    Cache cache_;
};

/// Adaptive-moment first-order update with bias correction.
template <class T>
class Adam {
public:
    Adam(double lr, double beta1, double beta2, double eps) : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

    void step(const std::vector<Parameter<T>*>& params) {
        if (m_.empty()) {
            for (auto* p : params) {
                m_.emplace_back(p->value.size(), 0.0);
                v_.emplace_back(p->value.size(), 0.0);
            }
        }
        ++t_;
        const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
        for (std::size_t k = 0; k < params.size(); ++k) {
            auto& p = *params[k];
            auto& m = m_[k];
            auto& v = v_[k];
            for (std::size_t i = 0; i < p.value.size(); ++i) {
                const double g = static_cast<double>(p.grad[i]);
                m[i] = b1_ * m[i] + (1.0 - b1_) * g;
                v[i] = b2_ * v[i] + (1.0 - b2_) * g * g;
                const double update = lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
                p.value[i] = static_cast<T>(static_cast<double>(p.value[i]) - update);
            }
        }
    }

    long steps() const { return t_; }

private:
    double lr_, b1_, b2_, eps_;
    long t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

}  // namespace gpgl::nn
