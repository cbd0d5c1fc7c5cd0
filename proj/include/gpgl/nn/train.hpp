#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpgl/error.hpp"
#include "gpgl/grid_tensor.hpp"
#include "gpgl/nn/network.hpp"
#include "gpgl/parallel.hpp"
#include "gpgl/random.hpp"

namespace gpgl::nn {

/// Labelled layout tensors; several samples may come from one graph.
struct SampleSet {
    std::size_t height = 0, width = 0, channels = 0;
    std::size_t classes = 0;
    std::vector<float> values;  // count * height * width * channels
    std::vector<int> labels;
    std::vector<long> graph_ids;

    std::size_t count() const { return labels.size(); }
    std::size_t sample_size() const { return height * width * channels; }
};

inline SampleSet make_sample_set(TensorContainer tensors, std::vector<int> labels, std::vector<long> graph_ids,
                                 std::size_t classes) {
    if (labels.size() != tensors.count || graph_ids.size() != tensors.count)
        throw ShapeMismatch("labels and graph ids must match the tensor count");
    SampleSet s{tensors.height, tensors.width, tensors.channels, classes, std::move(tensors.values),
                std::move(labels), std::move(graph_ids)};
    for (auto l : s.labels)
        if (l < 0 || static_cast<std::size_t>(l) >= classes) throw InvalidArgument("label out of range");
    return s;
}

template <class T>
Tensor4<T> gather_batch(const SampleSet& set, std::span<const std::size_t> idx) {
    Tensor4<T> x(idx.size(), set.height, set.width, set.channels);
    const auto sz = set.sample_size();
    for (std::size_t b = 0; b < idx.size(); ++b) {
        const float* src = set.values.data() + idx[b] * sz;
        std::transform(src, src + sz, x.data.begin() + static_cast<std::ptrdiff_t>(b * sz), [](float v) { return static_cast<T>(v); });
    }
    return x;
}

/// Most frequent label; ties go to the smallest class index.
inline int majority_vote(std::span<const int> predictions) {
    if (predictions.empty()) throw InvalidArgument("majority_vote needs at least one prediction");
    std::map<int, std::size_t> counts;
    for (auto p : predictions) ++counts[p];
    int best = counts.begin()->first;
    std::size_t best_count = 0;
    for (const auto& [label, n] : counts)
        if (n > best_count) {
            best = label;
            best_count = n;
        }
    return best;
}

/// Stratified random assignment of graphs to folds. Returns fold index
/// per graph (indexed by position in `graph_labels`).
inline std::vector<int> stratified_folds(const std::vector<int>& graph_labels, int folds, std::uint64_t seed) {
    if (folds < 2) throw InvalidArgument("need at least two folds");
    Rng rng(seed);
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t g = 0; g < graph_labels.size(); ++g) by_class[graph_labels[g]].push_back(g);
    std::vector<int> fold(graph_labels.size(), 0);
    std::size_t next = 0;
    for (auto& [label, members] : by_class) {
        rng.shuffle(members);
        for (auto g : members) fold[g] = static_cast<int>(next++ % static_cast<std::size_t>(folds));
    }
    return fold;
}

template <class T>
std::vector<int> predict(Network<T>& net, const SampleSet& set, std::span<const std::size_t> idx, std::size_t batch = 32) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (std::size_t start = 0; start < idx.size(); start += batch) {
        const auto chunk = idx.subspan(start, std::min(batch, idx.size() - start));
        const auto logits = net.forward(gather_batch<T>(set, chunk));
        for (std::size_t r = 0; r < logits.rows; ++r) {
            std::size_t arg = 0;
            for (std::size_t c = 1; c < logits.cols; ++c)
                if (logits(r, c) > logits(r, arg)) arg = c;
            out.push_back(static_cast<int>(arg));
        }
    }
    return out;
}

template <class T>
double mean_loss(Network<T>& net, const SampleSet& set, std::span<const std::size_t> idx, std::size_t batch = 32) {
    double total = 0.0;
    for (std::size_t start = 0; start < idx.size(); start += batch) {
        const auto chunk = idx.subspan(start, std::min(batch, idx.size() - start));
        std::vector<int> labels;
        for (auto i : chunk) labels.push_back(set.labels[i]);
        total += static_cast<double>(net.loss_and_backward(gather_batch<T>(set, chunk), labels, nullptr)) *
                 static_cast<double>(chunk.size());
    }
    return idx.empty() ? 0.0 : total / static_cast<double>(idx.size());
}

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;  // NaN when no validation split
    double train_accuracy = 0.0;
};

template <class T>
struct TrainResult {
    Network<T> model;
    std::vector<EpochRecord> curve;
    int best_epoch = 0;
};

/// Minibatch Adam on `train_idx`. With patience > 0 and a non-empty
/// validation split, the parameters of the epoch with the lowest
/// validation loss are kept and training stops after `patience` epochs
/// without improvement.
template <class T>
TrainResult<T> train_model(const SampleSet& set, const std::vector<std::size_t>& train_idx,
                           const std::vector<std::size_t>& val_idx, NetworkConfig cfg,
                           const std::function<void(const EpochRecord&)>& on_epoch = {}) {
    cfg.input_height = set.height;
    cfg.input_width = set.width;
    cfg.input_channels = set.channels;
    cfg.classes = set.classes;
    TrainResult<T> res{Network<T>(cfg), {}, 0};
    auto& net = res.model;
    auto params = net.parameters();
    Adam<T> adam(cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
    Rng rng(cfg.seed ^ 0x5bd1e995ULL);

    const bool early_stop = cfg.patience > 0 && !val_idx.empty();
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<Buffer<T>> best_values;
    int since_best = 0;

    std::vector<std::size_t> order = train_idx;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::span<const std::size_t> chunk(order.data() + start, std::min(cfg.batch_size, order.size() - start));
            std::vector<int> labels;
            for (auto i : chunk) labels.push_back(set.labels[i]);
            net.zero_grad();
            const auto x = gather_batch<T>(set, chunk);
            Matrix<T> probs;
            const auto logits = net.forward(x, &rng);
            const T loss = softmax_cross_entropy(logits, labels, probs);
            if (!std::isfinite(static_cast<double>(loss)))
                throw Divergence("training loss became non-finite in epoch " + std::to_string(epoch), epoch);
            for (std::size_t r = 0; r < probs.rows; ++r) {
                std::size_t arg = 0;
                for (std::size_t c = 1; c < probs.cols; ++c)
                    if (probs(r, c) > probs(r, arg)) arg = c;
                correct += static_cast<int>(arg) == labels[r] ? 1 : 0;
                probs(r, static_cast<std::size_t>(labels[r])) -= T(1);
                for (std::size_t c = 0; c < probs.cols; ++c) probs(r, c) /= static_cast<T>(probs.rows);
            }
            net.backward(std::move(probs));
            adam.step(params);
            loss_sum += static_cast<double>(loss) * static_cast<double>(chunk.size());
        }
        EpochRecord rec{epoch, order.empty() ? 0.0 : loss_sum / static_cast<double>(order.size()),
                        std::numeric_limits<double>::quiet_NaN(),
                        order.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(order.size())};
        if (!val_idx.empty()) rec.val_loss = mean_loss(net, set, val_idx);
        res.curve.push_back(rec);
        if (on_epoch) on_epoch(rec);
        if (early_stop) {
            if (rec.val_loss < best_val) {
                best_val = rec.val_loss;
                res.best_epoch = epoch;
                since_best = 0;
                best_values.clear();
                for (auto* p : params) best_values.push_back(p->value);
            } else if (++since_best >= cfg.patience) {
                break;
            }
        } else {
            res.best_epoch = epoch;
        }
    }
    if (early_stop && !best_values.empty())
        for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = best_values[k];
    return res;
}

struct FoldReport {
    int fold = 0;
    std::size_t train_samples = 0, test_samples = 0, test_graphs = 0;
    double layout_accuracy = 0.0;
    double graph_accuracy = 0.0;
    int epochs_run = 0;
    int best_epoch = 0;
    std::vector<EpochRecord> curve;
};

struct CrossValidationReport {
    std::vector<FoldReport> folds;
    double mean_layout_accuracy = 0.0;
    double mean_graph_accuracy = 0.0;
    double std_graph_accuracy = 0.0;
};

struct CrossValidationOptions {
    int folds = 10;
    double validation_fraction = 0.1;  // of each fold's training graphs, for early stopping
    std::vector<int> only_folds;       // run a subset of folds; empty = all
    unsigned jobs = 1;                 // folds trained concurrently
};

/// k-fold cross-validation over graphs: all layouts of a graph share its
/// fold. Graph predictions are the majority vote over the graph's layouts.
/// With opt.jobs > 1 the callbacks may run concurrently from different folds;
/// the report itself does not depend on the job count.
template <class T>
CrossValidationReport cross_validate(const SampleSet& set, const NetworkConfig& cfg, const CrossValidationOptions& opt = {},
                                     const std::function<void(int, const EpochRecord&)>& on_epoch = {},
                                     const std::function<void(int, Network<T>&, int)>& on_model = {}) {
    std::map<long, int> graph_label;
    for (std::size_t i = 0; i < set.count(); ++i) graph_label[set.graph_ids[i]] = set.labels[i];
    std::vector<long> graphs;
    std::vector<int> labels;
    for (const auto& [g, l] : graph_label) {
        graphs.push_back(g);
        labels.push_back(l);
    }
    const auto fold_of_pos = stratified_folds(labels, opt.folds, cfg.seed);
    std::map<long, int> fold_of;
    for (std::size_t k = 0; k < graphs.size(); ++k) fold_of[graphs[k]] = fold_of_pos[k];

    std::vector<int> run;
    for (int f = 0; f < opt.folds; ++f)
        if (opt.only_folds.empty() || std::find(opt.only_folds.begin(), opt.only_folds.end(), f) != opt.only_folds.end())
            run.push_back(f);

    CrossValidationReport rep;
    rep.folds.resize(run.size());
    parallel_for(run.size(), opt.jobs, [&](std::size_t slot) {
        const int f = run[slot];
        // validation graphs: a seeded, stratified slice of this fold's training graphs
        std::vector<long> train_graphs;
        std::vector<int> train_labels;
        for (std::size_t k = 0; k < graphs.size(); ++k)
            if (fold_of_pos[k] != f) {
                train_graphs.push_back(graphs[k]);
                train_labels.push_back(labels[k]);
            }
        std::map<long, bool> is_val;
        if (cfg.patience > 0 && opt.validation_fraction > 0.0) {
            const int parts = std::max(2, static_cast<int>(std::lround(1.0 / opt.validation_fraction)));
            const auto sub = stratified_folds(train_labels, parts, cfg.seed + 1000 + static_cast<std::uint64_t>(f));
            for (std::size_t k = 0; k < train_graphs.size(); ++k) is_val[train_graphs[k]] = sub[k] == 0;
        }
        std::vector<std::size_t> train_idx, val_idx, test_idx;
        for (std::size_t i = 0; i < set.count(); ++i) {
            const auto g = set.graph_ids[i];
            if (fold_of.at(g) == f)
                test_idx.push_back(i);
            else if (auto it = is_val.find(g); it != is_val.end() && it->second)
                val_idx.push_back(i);
            else
                train_idx.push_back(i);
        }
        NetworkConfig fold_cfg = cfg;
        fold_cfg.seed = cfg.seed + static_cast<std::uint64_t>(f);
        auto result = train_model<T>(set, train_idx, val_idx, fold_cfg,
                                     [&](const EpochRecord& r) { if (on_epoch) on_epoch(f, r); });
        const auto preds = predict(result.model, set, test_idx);

        FoldReport fr;
        fr.fold = f;
        fr.train_samples = train_idx.size();
        fr.test_samples = test_idx.size();
        fr.epochs_run = static_cast<int>(result.curve.size());
        fr.best_epoch = result.best_epoch;
        fr.curve = result.curve;
        std::size_t correct = 0;
        std::map<long, std::vector<int>> votes;
        for (std::size_t k = 0; k < test_idx.size(); ++k) {
            correct += preds[k] == set.labels[test_idx[k]] ? 1 : 0;
            votes[set.graph_ids[test_idx[k]]].push_back(preds[k]);
        }
        fr.layout_accuracy = test_idx.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test_idx.size());
        std::size_t graph_correct = 0;
        for (const auto& [g, v] : votes) graph_correct += majority_vote(v) == graph_label.at(g) ? 1 : 0;
        fr.test_graphs = votes.size();
        fr.graph_accuracy = votes.empty() ? 0.0 : static_cast<double>(graph_correct) / static_cast<double>(votes.size());
        if (on_model) on_model(f, result.model, result.best_epoch);
        rep.folds[slot] = std::move(fr);
    });
    if (!rep.folds.empty()) {
        for (const auto& f : rep.folds) {
            rep.mean_layout_accuracy += f.layout_accuracy;
            rep.mean_graph_accuracy += f.graph_accuracy;
        }
        rep.mean_layout_accuracy /= static_cast<double>(rep.folds.size());
        rep.mean_graph_accuracy /= static_cast<double>(rep.folds.size());
        double var = 0.0;
        for (const auto& f : rep.folds) var += std::pow(f.graph_accuracy - rep.mean_graph_accuracy, 2);
        rep.std_graph_accuracy = std::sqrt(var / static_cast<double>(rep.folds.size()));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// checkpoints: one JSON header line, then float32 parameter blocks in
// declaration order (little-endian).

template <class T>
void save_checkpoint(const std::string& path, Network<T>& net, int epoch) {
    nlohmann::ordered_json header = {{"format", "gpgl-msm-cnn"}, {"config", to_json(net.config())},
                                     {"seed", net.config().seed}, {"epoch", epoch}};
    auto& blocks = header["blocks"] = nlohmann::ordered_json::array();
    for (auto* p : net.parameters()) blocks.push_back({{"name", p->name}, {"size", p->value.size()}});
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << header.dump() << '\n';
    for (auto* p : net.parameters())
        for (auto v : p->value) {
            const float f = static_cast<float>(v);
            out.write(reinterpret_cast<const char*>(&f), sizeof f);
        }
    if (!out) throw IoError("failed writing " + path);
}

template <class T>
Network<T> load_checkpoint(const std::string& path, int* epoch = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, 1, e.what());
    }
    Network<T> net(network_config_from_json(header.at("config")));
    auto params = net.parameters();
    const auto& blocks = header.at("blocks");
    if (blocks.size() != params.size()) throw ParseError(path, 1, "parameter block count mismatch");
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (blocks[k].at("size").get<std::size_t>() != params[k]->value.size())
            throw ParseError(path, 1, "size mismatch for block " + params[k]->name);
        for (auto& v : params[k]->value) {
            float f;
            if (!in.read(reinterpret_cast<char*>(&f), sizeof f)) throw ParseError(path, 2, "truncated parameter data");
            v = static_cast<T>(f);
        }
    }
    if (epoch) *epoch = header.at("epoch").get<int>();
    return net;
}

}  // namespace gpgl::nn
