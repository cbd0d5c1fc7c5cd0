// gpgl: command-line front end for grid layouts, tensor export, training
// and benchmarking. Errors are reported as one JSON object on stderr with
// a nonzero exit status.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gpgl/gpgl.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::string dataset;
    std::string data_root;
    std::string out;
    gpgl::LayoutParams layout;
    std::string optimizer = "lbfgs";
    std::size_t k = 1;
    std::size_t window = 64;
    std::string merge = "average";
    std::string features = "auto";
    std::size_t degree_cap = 256;
    int jobs = 0;
    long limit = -1;
    std::vector<long> graph_ids;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// A bare name such as "MUTAG" is looked up under --data-root
// (default $GPGL_DATA, else ./data); anything else is taken as a path.
fs::path resolve_dataset(const RunConfig& rc) {
    if (rc.dataset.empty()) throw gpgl::InvalidArgument("--dataset is required");
    fs::path p(rc.dataset);
    if (fs::is_directory(p)) return p;
    std::string root = rc.data_root;
    if (root.empty()) {
        const char* env = std::getenv("GPGL_DATA");
        root = env ? env : "data";
    }
    const auto candidate = fs::path(root) / rc.dataset;
    if (fs::is_directory(candidate)) return candidate;
    throw gpgl::IoError("dataset '" + rc.dataset + "' not found (looked at " + p.string() + " and " + candidate.string() + ")");
}

void validate(RunConfig& rc) {
    if (rc.optimizer == "lbfgs")
        rc.layout.method = gpgl::OptimizerKind::lbfgs;
    else if (rc.optimizer == "gd")
        rc.layout.method = gpgl::OptimizerKind::gradient_descent;
    else
        throw gpgl::InvalidArgument("--optimizer must be lbfgs or gd");
    rc.layout.validate();
    if (rc.k < 1) throw gpgl::InvalidArgument("--k must be at least 1");
    if (rc.window < 1) throw gpgl::InvalidArgument("--window must be positive");
    gpgl::parse_merge_rule(rc.merge);
    gpgl::parse_feature_mode(rc.features);
}

void add_dataset_flags(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--dataset", rc.dataset, "dataset directory or name under --data-root")->required();
    cmd->add_option("--data-root", rc.data_root, "directory holding named datasets (default $GPGL_DATA or ./data)");
    cmd->add_option("--limit", rc.limit, "only the first N graphs");
    cmd->add_option("--graph", rc.graph_ids, "only these graph ids (0-based, repeatable)");
}

void add_layout_flags(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--alpha", rc.layout.alpha, "separation threshold")->capture_default_str();
    cmd->add_option("--lambda", rc.layout.lambda, "separation penalty weight")->capture_default_str();
    cmd->add_option("--gamma", rc.layout.gamma, "rescale floor")->capture_default_str();
    cmd->add_flag("--rescale", rc.layout.enable_rescale, "zoom the stress solution before the regularized solve");
    cmd->add_option("--max-iters", rc.layout.max_iters, "iteration cap per solve")->capture_default_str();
    cmd->add_option("--grad-tol", rc.layout.grad_tol, "gradient max-norm stopping tolerance")->capture_default_str();
    cmd->add_option("--seed", rc.layout.seed, "base seed")->capture_default_str();
    cmd->add_option("--optimizer", rc.optimizer, "lbfgs or gd")->capture_default_str();
    cmd->add_option("--jobs", rc.jobs, "worker threads (default $GPGL_JOBS or 1)");
}

std::vector<long> selected_graphs(const RunConfig& rc, const gpgl::GraphDataset& ds) {
    std::vector<long> ids;
    if (!rc.graph_ids.empty()) {
        for (auto g : rc.graph_ids) {
            if (g < 0 || static_cast<std::size_t>(g) >= ds.size())
                throw gpgl::IndexError("graph id " + std::to_string(g) + " outside 0.." + std::to_string(ds.size() - 1));
            ids.push_back(g);
        }
        return ids;
    }
    const auto n = rc.limit >= 0 ? std::min<std::size_t>(static_cast<std::size_t>(rc.limit), ds.size()) : ds.size();
    for (std::size_t i = 0; i < n; ++i) ids.push_back(static_cast<long>(i));
    return ids;
}

std::vector<gpgl::AugmentedSet> run_augment(const RunConfig& rc, const gpgl::GraphDataset& ds, const std::vector<long>& ids) {
    std::vector<gpgl::AugmentedSet> sets(ids.size());
    gpgl::parallel_for(ids.size(), gpgl::resolve_jobs(rc.jobs), [&](std::size_t i) {
        sets[i] = gpgl::augment(ds.graphs[static_cast<std::size_t>(ids[i])], rc.layout, rc.k, ids[i]);
    });
    return sets;
}

ordered_json layout_record(const gpgl::AugmentedSet& set, const gpgl::AugmentedLayout& l) {
    ordered_json j = {{"graph", set.graph_id}, {"seed", l.seed}, {"failed", l.failed}};
    if (l.failed) {
        j["error"] = l.error;
        return j;
    }
    auto cells = ordered_json::array();
    for (const auto& c : l.cells) cells.push_back({c.x, c.y});
    j["cells"] = std::move(cells);
    j["kk_loss"] = l.diagnostics.kk_loss;
    j["separation"] = l.diagnostics.separation;
    j["kk_iterations"] = l.diagnostics.kk_iterations;
    j["gpgl_iterations"] = l.diagnostics.gpgl_iterations;
    j["converged"] = l.diagnostics.converged;
    j["vertex_loss"] = l.diagnostics.vertex_loss;
    return j;
}

void write_layouts(const std::string& path, const std::vector<gpgl::AugmentedSet>& sets) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw gpgl::IoError("cannot open " + path + " for writing");
    for (const auto& s : sets)
        for (const auto& l : s.layouts) out << layout_record(s, l).dump() << '\n';
    if (!out) throw gpgl::IoError("failed writing " + path);
}

ordered_json layout_summary(const gpgl::GraphDataset& ds, const std::vector<gpgl::AugmentedSet>& sets) {
    std::size_t lost = 0, vertices = 0, layouts = 0, failed = 0;
    for (const auto& s : sets)
        for (const auto& l : s.layouts) {
            if (l.failed) {
                ++failed;
                continue;
            }
            ++layouts;
            lost += l.diagnostics.vertex_loss;
            vertices += ds.graphs[static_cast<std::size_t>(s.graph_id)].num_vertices();
        }
    return {{"dataset", ds.name}, {"graphs", sets.size()}, {"layouts", layouts}, {"failed", failed},
            {"lost_vertices", lost}, {"vertices", vertices},
            {"vertex_loss_ratio", vertices ? 100.0 * static_cast<double>(lost) / static_cast<double>(vertices) : 0.0}};
}

int cmd_layout(RunConfig& rc) {
    validate(rc);
    if (rc.out.empty()) throw gpgl::InvalidArgument("--out is required");
    const auto t0 = Clock::now();
    const auto ds = gpgl::load_tudataset(resolve_dataset(rc));
    const auto sets = run_augment(rc, ds, selected_graphs(rc, ds));
    write_layouts(rc.out, sets);
    auto summary = layout_summary(ds, sets);
    std::ofstream(rc.out + ".summary.json", std::ios::trunc) << summary.dump(2) << '\n';
    summary["wall_seconds"] = seconds_since(t0);
    std::cerr << summary.dump() << '\n';
    return 0;
}

int cmd_export(RunConfig& rc) {
    validate(rc);
    if (rc.out.empty()) throw gpgl::InvalidArgument("--out is required");
    const auto t0 = Clock::now();
    const auto ds = gpgl::featurize(gpgl::load_tudataset(resolve_dataset(rc)), gpgl::parse_feature_mode(rc.features), rc.degree_cap);
    const auto sets = run_augment(rc, ds, selected_graphs(rc, ds));
    const auto manifest = gpgl::export_tensors(sets, ds, rc.out, {rc.window, rc.window}, gpgl::parse_merge_rule(rc.merge));
    write_layouts(rc.out + ".layouts.jsonl", sets);
    auto summary = layout_summary(ds, sets);
    summary["tensors"] = manifest.entries.size();
    summary["channels"] = manifest.channels;
    summary["window"] = rc.window;
    summary["wall_seconds"] = seconds_since(t0);
    std::cerr << summary.dump() << '\n';
    return 0;
}

void print_stats_table(const gpgl::GraphDataset& ds, const gpgl::DatasetStats& st) {
    std::cout << std::left << std::setw(12) << "dataset" << std::right << std::setw(8) << "graphs" << std::setw(9) << "classes"
              << std::setw(10) << "avg.node" << std::setw(10) << "avg.edge" << std::setw(10) << "avg.deg" << std::setw(11)
              << "edge/node" << std::setw(11) << "max.deg" << std::setw(10) << "feat.dim" << '\n';
    std::cout << std::left << std::setw(12) << ds.name << std::right << std::setw(8) << st.num_graphs << std::setw(9)
              << st.num_classes << std::fixed << std::setprecision(2) << std::setw(10) << st.avg_nodes << std::setw(10)
              << st.avg_edges << std::setw(10) << st.avg_degree << std::setw(11) << st.edges_per_node << std::setw(11)
              << st.max_degree << std::setw(10) << st.feature_dim << '\n';
}

int cmd_stats(RunConfig& rc, bool as_json) {
    validate(rc);
    auto ds = gpgl::load_tudataset(resolve_dataset(rc));
    ds = gpgl::featurize(std::move(ds), gpgl::parse_feature_mode(rc.features), rc.degree_cap);
    const auto st = gpgl::dataset_stats(ds);
    if (as_json) {
        ordered_json j = {{"dataset", ds.name},         {"graphs", st.num_graphs},       {"classes", st.num_classes},
                          {"avg_nodes", st.avg_nodes},  {"avg_edges", st.avg_edges},     {"avg_degree", st.avg_degree},
                          {"edges_per_node", st.edges_per_node}, {"max_degree", st.max_degree},
                          {"feature_dim", st.feature_dim}, {"class_sizes", st.class_sizes}};
        std::cout << j.dump(2) << '\n';
    } else {
        print_stats_table(ds, st);
    }
    return 0;
}

std::vector<gpgl::AugmentedSet> read_layouts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gpgl::IoError("cannot open " + path);
    std::vector<gpgl::AugmentedSet> sets;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw gpgl::ParseError(path, ln, e.what());
        }
        const long g = j.at("graph").get<long>();
        if (sets.empty() || sets.back().graph_id != g) sets.push_back({g, 0, {}});
        gpgl::AugmentedLayout l;
        l.seed = j.at("seed").get<std::uint64_t>();
        l.failed = j.at("failed").get<bool>();
        if (!l.failed)
            for (const auto& c : j.at("cells")) l.cells.push_back({c.at(0).get<long>(), c.at(1).get<long>()});
        sets.back().layouts.push_back(std::move(l));
        sets.back().k = sets.back().layouts.size();
    }
    return sets;
}

int cmd_render(RunConfig& rc, const std::string& layouts_path, double cell_px) {
    validate(rc);
    if (rc.out.empty()) throw gpgl::InvalidArgument("--out (directory) is required");
    const auto ds = gpgl::load_tudataset(resolve_dataset(rc));
    const auto sets = layouts_path.empty() ? run_augment(rc, ds, selected_graphs(rc, ds)) : read_layouts(layouts_path);
    fs::create_directories(rc.out);
    gpgl::SvgStyle style;
    style.cell = cell_px;
    std::size_t written = 0;
    for (const auto& s : sets) {
        if (s.graph_id < 0 || static_cast<std::size_t>(s.graph_id) >= ds.size())
            throw gpgl::IndexError("layout refers to graph " + std::to_string(s.graph_id) + " outside the dataset");
        for (const auto& l : s.layouts) {
            if (l.failed) continue;
            const auto name = "graph" + std::to_string(s.graph_id) + "_seed" + std::to_string(l.seed) + ".svg";
            std::ofstream out(fs::path(rc.out) / name, std::ios::trunc);
            out << gpgl::render_svg(ds.graphs[static_cast<std::size_t>(s.graph_id)], l.cells, style);
            if (!out) throw gpgl::IoError("failed writing " + (fs::path(rc.out) / name).string());
            ++written;
        }
    }
    std::cerr << ordered_json{{"svg_files", written}, {"directory", rc.out}}.dump() << '\n';
    return 0;
}

struct TrainFlags {
    std::string tensors;
    std::string report;
    std::string curve;
    std::string checkpoint_dir;
    std::vector<std::size_t> conv{64, 128, 256};
    std::vector<std::size_t> fc{256, 128};
    std::size_t scales = 3;
    std::string global_pool = "max";
    double lr = 1e-4;
    std::size_t batch = 10;
    double dropout = 0.3;
    int epochs = 100;
    int patience = 10;
    int folds = 10;
    double val_fraction = 0.1;
    std::uint64_t seed = 0;
    std::vector<int> only_folds;
    int jobs = 0;
};

gpgl::nn::NetworkConfig network_config(const TrainFlags& tf) {
    gpgl::nn::NetworkConfig c;
    c.conv_channels = tf.conv;
    c.fc = tf.fc;
    c.scales = tf.scales;
    if (tf.global_pool == "max")
        c.global_pool = gpgl::nn::GlobalPool::max;
    else if (tf.global_pool == "mean")
        c.global_pool = gpgl::nn::GlobalPool::mean;
    else
        throw gpgl::InvalidArgument("--global-pool must be max or mean");
    c.learning_rate = tf.lr;
    c.batch_size = tf.batch;
    c.dropout = tf.dropout;
    c.epochs = tf.epochs;
    c.patience = tf.patience;
    c.seed = tf.seed;
    return c;
}

void add_train_flags(CLI::App* cmd, TrainFlags& tf) {
    cmd->add_option("--conv", tf.conv, "MSM-Conv channel counts")->delimiter(',')->capture_default_str();
    cmd->add_option("--fc", tf.fc, "hidden FC widths")->delimiter(',')->capture_default_str();
    cmd->add_option("--scales", tf.scales, "branches per MSM-Conv")->capture_default_str();
    cmd->add_option("--global-pool", tf.global_pool, "max or mean")->capture_default_str();
    cmd->add_option("--lr", tf.lr, "Adam learning rate")->capture_default_str();
    cmd->add_option("--batch", tf.batch, "minibatch size")->capture_default_str();
    cmd->add_option("--dropout", tf.dropout, "dropout ratio after hidden FC layers")->capture_default_str();
}

gpgl::nn::SampleSet load_samples(const std::string& tensors) {
    const auto manifest = gpgl::load_manifest(tensors);
    auto container = gpgl::read_tensor_container(tensors);
    std::vector<int> labels;
    std::vector<long> graphs;
    for (const auto& e : manifest.entries) {
        labels.push_back(e.label);
        graphs.push_back(e.graph_id);
    }
    return gpgl::nn::make_sample_set(std::move(container), std::move(labels), std::move(graphs), manifest.class_count);
}

int cmd_train(const TrainFlags& tf) {
    const auto cfg = network_config(tf);
    cfg.validate();
    const auto set = load_samples(tf.tensors);
    const auto t0 = Clock::now();
    if (!tf.checkpoint_dir.empty()) fs::create_directories(tf.checkpoint_dir);
    gpgl::nn::CrossValidationOptions opt;
    opt.folds = tf.folds;
    opt.validation_fraction = tf.val_fraction;
    opt.only_folds = tf.only_folds;
    opt.jobs = gpgl::resolve_jobs(tf.jobs);
    const auto rep = gpgl::nn::cross_validate<float>(set, cfg, opt, {}, [&](int fold, gpgl::nn::Network<float>& net, int epoch) {
        if (tf.checkpoint_dir.empty()) return;
        gpgl::nn::save_checkpoint((fs::path(tf.checkpoint_dir) / ("fold" + std::to_string(fold) + ".ckpt")).string(), net, epoch);
    });

    if (!tf.curve.empty()) {
        std::ofstream curve(tf.curve, std::ios::trunc);
        if (!curve) throw gpgl::IoError("cannot open " + tf.curve + " for writing");
        for (const auto& f : rep.folds)
            for (const auto& r : f.curve) {
                ordered_json j = {{"fold", f.fold}, {"epoch", r.epoch}, {"train_loss", r.train_loss}, {"train_accuracy", r.train_accuracy}};
                j["val_loss"] = std::isnan(r.val_loss) ? ordered_json(nullptr) : ordered_json(r.val_loss);
                curve << j.dump() << '\n';
            }
    }
    ordered_json out = {{"tensors", tf.tensors}, {"samples", set.count()}, {"config", gpgl::nn::to_json(cfg)}};
    auto& folds = out["folds"] = ordered_json::array();
    for (const auto& f : rep.folds)
        folds.push_back({{"fold", f.fold}, {"train_samples", f.train_samples}, {"test_samples", f.test_samples},
                         {"test_graphs", f.test_graphs}, {"layout_accuracy", f.layout_accuracy},
                         {"graph_accuracy", f.graph_accuracy}, {"epochs_run", f.epochs_run}, {"best_epoch", f.best_epoch}});
    out["mean_layout_accuracy"] = rep.mean_layout_accuracy;
    out["mean_graph_accuracy"] = rep.mean_graph_accuracy;
    out["std_graph_accuracy"] = rep.std_graph_accuracy;
    if (!tf.report.empty()) std::ofstream(tf.report, std::ios::trunc) << out.dump(2) << '\n';
    std::cout << out.dump(2) << '\n';
    std::cerr << ordered_json{{"wall_seconds", seconds_since(t0)}}.dump() << '\n';
    return 0;
}

int cmd_bench(RunConfig& rc, const TrainFlags& tf, std::size_t infer_samples) {
    validate(rc);
    auto ds = gpgl::featurize(gpgl::load_tudataset(resolve_dataset(rc)), gpgl::parse_feature_mode(rc.features), rc.degree_cap);
    const auto ids = selected_graphs(rc, ds);
    std::vector<gpgl::AugmentedSet> sets;
    const auto t0 = Clock::now();
    for (auto g : ids) sets.push_back(gpgl::augment(ds.graphs[static_cast<std::size_t>(g)], rc.layout, 1, g));
    const double layout_seconds = seconds_since(t0);

    // inference on the first tensors that fit the window
    std::vector<gpgl::GridTensor> tensors;
    for (const auto& s : sets) {
        if (tensors.size() >= infer_samples) break;
        const auto& l = s.layouts.front();
        if (l.failed) continue;
        try {
            tensors.push_back(gpgl::build_grid_tensor(l.cells, ds.graphs[static_cast<std::size_t>(s.graph_id)].features(),
                                                      {rc.window, rc.window})
                                  .first);
        } catch (const gpgl::WindowOverflow&) {
        }
    }
    double infer_seconds = 0.0;
    if (!tensors.empty()) {
        auto cfg = network_config(tf);
        cfg.input_height = cfg.input_width = rc.window;
        cfg.input_channels = tensors.front().channels;
        cfg.classes = std::max<std::size_t>(2, ds.class_count);
        gpgl::nn::Network<float> net(cfg);
        const auto t1 = Clock::now();
        for (const auto& t : tensors) {
            gpgl::nn::Tensor4<float> x(1, t.height, t.width, t.channels);
            x.data.assign(t.data.begin(), t.data.end());
            (void)net.forward(x);
        }
        infer_seconds = seconds_since(t1) / static_cast<double>(tensors.size());
    }
    ordered_json out = {{"dataset", ds.name},
                        {"graphs", ids.size()},
                        {"avg_nodes", gpgl::dataset_stats(ds).avg_nodes},
                        {"mean_layout_seconds", ids.empty() ? 0.0 : layout_seconds / static_cast<double>(ids.size())},
                        {"inference_tensors", tensors.size()},
                        {"mean_inference_seconds", infer_seconds}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

void report_error(const std::string& kind, const std::string& message, int code) {
    std::cerr << ordered_json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-preserving grid layouts and multi-scale maxout CNN classification"};
    app.require_subcommand(1);
    RunConfig rc;
    TrainFlags tf;
    bool stats_json = false;
    std::string layouts_path;
    double cell_px = 24.0;
    std::size_t infer_samples = 20;

    auto* layout = app.add_subcommand("layout", "one grid layout per graph, written as JSON lines");
    add_dataset_flags(layout, rc);
    add_layout_flags(layout, rc);
    layout->add_option("--out", rc.out, "output .jsonl path")->required();

    auto* augment = app.add_subcommand("augment", "k grid layouts per graph from shuffled circular starts");
    add_dataset_flags(augment, rc);
    add_layout_flags(augment, rc);
    augment->add_option("--k", rc.k, "layouts per graph")->capture_default_str();
    augment->add_option("--out", rc.out, "output .jsonl path")->required();

    auto* exp = app.add_subcommand("export", "augment and write the tensor container plus manifest");
    add_dataset_flags(exp, rc);
    add_layout_flags(exp, rc);
    exp->add_option("--k", rc.k, "layouts per graph")->capture_default_str();
    exp->add_option("--window", rc.window, "square window side")->capture_default_str();
    exp->add_option("--merge", rc.merge, "average or max")->capture_default_str();
    exp->add_option("--features", rc.features, "auto, label or degree")->capture_default_str();
    exp->add_option("--degree-cap", rc.degree_cap, "max one-hot degree slots")->capture_default_str();
    exp->add_option("--out", rc.out, "tensor container path (manifest at <out>.json)")->required();

    auto* stats = app.add_subcommand("stats", "corpus statistics");
    add_dataset_flags(stats, rc);
    stats->add_option("--features", rc.features, "auto, label or degree")->capture_default_str();
    stats->add_option("--degree-cap", rc.degree_cap, "max one-hot degree slots")->capture_default_str();
    stats->add_flag("--json", stats_json, "print JSON instead of a table");

    auto* render = app.add_subcommand("render", "one SVG per layout");
    add_dataset_flags(render, rc);
    add_layout_flags(render, rc);
    render->add_option("--k", rc.k, "layouts per graph when computing on the fly")->capture_default_str();
    render->add_option("--layouts", layouts_path, "render layouts from a layout/augment .jsonl instead");
    render->add_option("--cell", cell_px, "pixels per grid cell")->capture_default_str();
    render->add_option("--out", rc.out, "output directory")->required();

    auto* train = app.add_subcommand("train", "k-fold cross-validation of the MSM-CNN on exported tensors");
    train->add_option("--tensors", tf.tensors, "tensor container written by export")->required();
    add_train_flags(train, tf);
    train->add_option("--seed", tf.seed, "fold split, initialization and shuffling seed")->capture_default_str();
    train->add_option("--epochs", tf.epochs, "epoch budget per fold")->capture_default_str();
    train->add_option("--patience", tf.patience, "early-stopping patience (0 disables)")->capture_default_str();
    train->add_option("--folds", tf.folds, "number of folds")->capture_default_str();
    train->add_option("--val-fraction", tf.val_fraction, "share of training graphs held out for early stopping")->capture_default_str();
    train->add_option("--only-fold", tf.only_folds, "run only these folds (repeatable)");
    train->add_option("--report", tf.report, "write the JSON report here as well");
    train->add_option("--curve", tf.curve, "per-epoch training curve as JSON lines");
    train->add_option("--checkpoint-dir", tf.checkpoint_dir, "save each fold's model as fold<k>.ckpt here");
    train->add_option("--jobs", tf.jobs, "folds trained concurrently (default $GPGL_JOBS or 1)");

    auto* bench = app.add_subcommand("bench", "mean layout time per graph and inference time per tensor");
    add_dataset_flags(bench, rc);
    add_layout_flags(bench, rc);
    add_train_flags(bench, tf);
    bench->add_option("--window", rc.window, "square window side")->capture_default_str();
    bench->add_option("--features", rc.features, "auto, label or degree")->capture_default_str();
    bench->add_option("--infer-samples", infer_samples, "tensors timed for inference")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("UsageError", e.what(), 1);
        return 1;
    }

    try {
        if (*layout) {
            rc.k = 1;
            return cmd_layout(rc);
        }
        if (*augment) return cmd_layout(rc);
        if (*exp) return cmd_export(rc);
        if (*stats) return cmd_stats(rc, stats_json);
        if (*render) return cmd_render(rc, layouts_path, cell_px);
        if (*train) return cmd_train(tf);
        if (*bench) {
            tf.seed = rc.layout.seed;
            return cmd_bench(rc, tf, infer_samples);
        }
    } catch (const gpgl::Error& e) {
        report_error(e.kind(), e.what(), 2);
        return 2;
    } catch (const nlohmann::json::exception& e) {
        report_error("ParseError", e.what(), 2);
        return 2;
    } catch (const std::exception& e) {
        report_error("InternalError", e.what(), 3);
        return 3;
    }
    return 0;
}
