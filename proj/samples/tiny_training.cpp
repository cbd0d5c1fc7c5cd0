// Builds a toy two-class problem (paths vs. stars), lays every graph out
// several times, and cross-validates a small MSM-CNN on the tensors.

#include <cstdio>
#include <vector>

#include "gpgl/gpgl.hpp"

namespace {

gpgl::Graph path_graph(std::size_t n) {
    std::vector<gpgl::Edge> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return gpgl::Graph(n, e);
}

gpgl::Graph star_graph(std::size_t n) {
    std::vector<gpgl::Edge> e;
    for (std::size_t i = 1; i < n; ++i) e.emplace_back(0, i);
    return gpgl::Graph(n, e);
}

}  // namespace

int main() {
    gpgl::GraphDataset ds;
    ds.name = "paths-vs-stars";
    ds.class_count = 2;
    ds.label_values = {0, 1};
    for (std::size_t n = 4; n < 14; ++n) {
        ds.graphs.push_back(path_graph(n));
        ds.labels.push_back(0);
        ds.graphs.push_back(star_graph(n));
        ds.labels.push_back(1);
    }
    ds = gpgl::featurize(std::move(ds), gpgl::FeatureMode::one_hot_degree, 8);

    gpgl::LayoutParams p;
    std::vector<gpgl::AugmentedSet> sets;
    for (std::size_t i = 0; i < ds.size(); ++i) sets.push_back(gpgl::augment(ds.graphs[i], p, 3, static_cast<long>(i)));
    const auto manifest = gpgl::export_tensors(sets, ds, "paths_vs_stars.bin", {16, 16});

    std::vector<int> labels;
    std::vector<long> graph_ids;
    for (const auto& e : manifest.entries) {
        labels.push_back(e.label);
        graph_ids.push_back(e.graph_id);
    }
    const auto set = gpgl::nn::make_sample_set(gpgl::read_tensor_container("paths_vs_stars.bin"), labels, graph_ids, 2);

    gpgl::nn::NetworkConfig cfg;
    cfg.conv_channels = {8, 16};
    cfg.fc = {16};
    cfg.scales = 2;
    cfg.learning_rate = 3e-3;
    cfg.epochs = 15;
    cfg.patience = 0;
    gpgl::nn::CrossValidationOptions opt;
    opt.folds = 4;
    const auto rep = gpgl::nn::cross_validate<float>(set, cfg, opt);
    for (const auto& f : rep.folds)
        std::printf("fold %d  layouts %.3f  graphs %.3f\n", f.fold, f.layout_accuracy, f.graph_accuracy);
    std::printf("mean graph accuracy %.3f\n", rep.mean_graph_accuracy);
    return 0;
}
