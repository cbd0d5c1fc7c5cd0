#pragma once

// Graph-classification benchmarks in the TUDataset text layout:
//   DS_A.txt                "row, col" per line, 1-indexed global node ids
//   DS_graph_indicator.txt  graph id (1-indexed) of node i on line i
//   DS_graph_labels.txt     class label of graph i on line i
//   DS_node_labels.txt      optional, integer label of node i on line i
//   DS_node_attributes.txt  optional, comma-separated reals of node i

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpgl/augment.hpp"
#include "gpgl/error.hpp"
#include "gpgl/graph.hpp"
#include "gpgl/grid_tensor.hpp"

namespace gpgl {

struct GraphDataset {
    std::string name;
    std::vector<Graph> graphs;
    std::vector<int> labels;                         // contiguous in [0, class_count)
    std::size_t class_count = 0;
    std::vector<long> label_values;                  // original label of class c
    std::vector<std::vector<long>> node_labels;      // empty when the file is absent
    std::vector<std::vector<std::vector<double>>> node_attributes;  // pass-through, may be empty

    std::size_t size() const { return graphs.size(); }
    bool has_node_labels() const { return !node_labels.empty(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view tok, const std::string& file, std::size_t line) {
    tok = trim(tok);
    T value{};
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (tok.empty() || ec != std::errc{} || ptr != last)
        throw ParseError(file, line, "expected a number, got '" + std::string(tok) + "'");
    return value;
}

// Non-empty lines of a text file; blank trailing lines are tolerated.
inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

inline std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(',', start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// Finds "<prefix>_<suffix>.txt" in dir; the prefix is the dataset name.
inline std::optional<std::filesystem::path> find_file(const std::filesystem::path& dir, const std::string& name,
                                                      const std::string& suffix) {
    auto p = dir / (name + "_" + suffix + ".txt");
    if (std::filesystem::exists(p)) return p;
    return std::nullopt;
}

inline std::string infer_dataset_name(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto fn = entry.path().filename().string();
        const std::string tail = "_graph_indicator.txt";
        if (fn.size() > tail.size() && fn.ends_with(tail)) return fn.substr(0, fn.size() - tail.size());
    }
    throw IoError("no *_graph_indicator.txt in " + dir.string());
}

}  // namespace detail

/// Loads a TUDataset directory. Edges are made undirected and
/// deduplicated; self-loops are dropped; graph labels are remapped to
/// 0..C-1 in ascending order of their original values.
inline GraphDataset load_tudataset(const std::filesystem::path& dir) {
    using detail::parse_number;
    GraphDataset ds;
    ds.name = detail::infer_dataset_name(dir);

    const auto indicator_path = *detail::find_file(dir, ds.name, "graph_indicator");
    const auto adjacency_path = detail::find_file(dir, ds.name, "A");
    const auto labels_path = detail::find_file(dir, ds.name, "graph_labels");
    if (!adjacency_path) throw IoError("missing " + ds.name + "_A.txt");
    if (!labels_path) throw IoError("missing " + ds.name + "_graph_labels.txt");

    const auto indicator_lines = detail::read_lines(indicator_path);
    const auto label_lines = detail::read_lines(*labels_path);
    const std::size_t num_graphs = label_lines.size();
    if (num_graphs == 0) throw ParseError(labels_path->string(), 1, "no graph labels");

    // node -> (graph, local index)
    const std::size_t num_nodes = indicator_lines.size();
    std::vector<std::size_t> graph_of(num_nodes), local_of(num_nodes);
    std::vector<std::size_t> sizes(num_graphs, 0);
    for (std::size_t i = 0; i < num_nodes; ++i) {
        const auto gid = parse_number<long>(indicator_lines[i], indicator_path.string(), i + 1);
        if (gid < 1 || static_cast<std::size_t>(gid) > num_graphs)
            throw IndexError(indicator_path.string() + ":" + std::to_string(i + 1) + ": graph id " +
                             std::to_string(gid) + " outside 1.." + std::to_string(num_graphs));
        graph_of[i] = static_cast<std::size_t>(gid - 1);
        local_of[i] = sizes[graph_of[i]]++;
    }

    std::vector<std::set<Edge>> edge_sets(num_graphs);
    {
        const auto path = adjacency_path->string();
        const auto lines = detail::read_lines(*adjacency_path);
        for (std::size_t ln = 0; ln < lines.size(); ++ln) {
            if (detail::trim(lines[ln]).empty()) continue;
            const auto parts = detail::split_commas(lines[ln]);
            if (parts.size() != 2) throw ParseError(path, ln + 1, "expected 'row, col'");
            const auto a = parse_number<long>(parts[0], path, ln + 1);
            const auto b = parse_number<long>(parts[1], path, ln + 1);
            if (a < 1 || b < 1 || static_cast<std::size_t>(a) > num_nodes || static_cast<std::size_t>(b) > num_nodes)
                throw IndexError(path + ":" + std::to_string(ln + 1) + ": node id outside 1.." + std::to_string(num_nodes));
            const auto u = static_cast<std::size_t>(a - 1), v = static_cast<std::size_t>(b - 1);
            if (graph_of[u] != graph_of[v])
                throw ParseError(path, ln + 1, "edge joins nodes of different graphs");
            if (u == v) continue;
            auto lu = local_of[u], lv = local_of[v];
            if (lu > lv) std::swap(lu, lv);
            edge_sets[graph_of[u]].insert({lu, lv});
        }
    }

    std::vector<long> raw_labels(num_graphs);
    for (std::size_t i = 0; i < num_graphs; ++i) raw_labels[i] = parse_number<long>(label_lines[i], labels_path->string(), i + 1);
    std::set<long> distinct(raw_labels.begin(), raw_labels.end());
    ds.label_values.assign(distinct.begin(), distinct.end());
    ds.class_count = ds.label_values.size();
    ds.labels.resize(num_graphs);
    for (std::size_t i = 0; i < num_graphs; ++i)
        ds.labels[i] = static_cast<int>(std::lower_bound(ds.label_values.begin(), ds.label_values.end(), raw_labels[i]) -
                                        ds.label_values.begin());

    ds.graphs.reserve(num_graphs);
    for (std::size_t gi = 0; gi < num_graphs; ++gi)
        ds.graphs.emplace_back(sizes[gi], std::vector<Edge>(edge_sets[gi].begin(), edge_sets[gi].end()));

    if (auto nl = detail::find_file(dir, ds.name, "node_labels")) {
        const auto lines = detail::read_lines(*nl);
        if (lines.size() != num_nodes)
            throw ParseError(nl->string(), lines.size() + 1, "expected one label per node (" + std::to_string(num_nodes) + ")");
        ds.node_labels.resize(num_graphs);
        for (std::size_t gi = 0; gi < num_graphs; ++gi) ds.node_labels[gi].resize(sizes[gi]);
        for (std::size_t i = 0; i < num_nodes; ++i)
            ds.node_labels[graph_of[i]][local_of[i]] = parse_number<long>(detail::split_commas(lines[i]).front(), nl->string(), i + 1);
    }

    if (auto na = detail::find_file(dir, ds.name, "node_attributes")) {
        const auto lines = detail::read_lines(*na);
        if (lines.size() != num_nodes)
            throw ParseError(na->string(), lines.size() + 1, "expected one attribute row per node");
        ds.node_attributes.resize(num_graphs);
        for (std::size_t gi = 0; gi < num_graphs; ++gi) ds.node_attributes[gi].resize(sizes[gi]);
        for (std::size_t i = 0; i < num_nodes; ++i) {
            auto& row = ds.node_attributes[graph_of[i]][local_of[i]];
            for (auto tok : detail::split_commas(lines[i])) row.push_back(parse_number<double>(tok, na->string(), i + 1));
        }
    }
    return ds;
}

enum class FeatureMode { one_hot_label, one_hot_degree, automatic };

inline FeatureMode parse_feature_mode(const std::string& s) {
    if (s == "label" || s == "one_hot_label") return FeatureMode::one_hot_label;
    if (s == "degree" || s == "one_hot_degree") return FeatureMode::one_hot_degree;
    if (s == "auto") return FeatureMode::automatic;
    throw InvalidArgument("unknown feature mode '" + s + "'");
}

/// Attaches exact one-hot vertex features. Label mode uses one slot per
/// distinct node label in the corpus; degree mode uses max degree + 1
/// slots, capped at `degree_cap` with larger degrees in the last slot.
inline GraphDataset featurize(GraphDataset ds, FeatureMode mode, std::size_t degree_cap = 256) {
    if (mode == FeatureMode::automatic)
        mode = ds.has_node_labels() ? FeatureMode::one_hot_label : FeatureMode::one_hot_degree;
    if (mode == FeatureMode::one_hot_label) {
        if (!ds.has_node_labels()) throw MissingNodeLabels(ds.name + " has no node labels");
        std::set<long> distinct;
        for (const auto& per_graph : ds.node_labels) distinct.insert(per_graph.begin(), per_graph.end());
        const std::vector<long> values(distinct.begin(), distinct.end());
        for (std::size_t gi = 0; gi < ds.graphs.size(); ++gi) {
            std::vector<std::vector<double>> feats(ds.graphs[gi].num_vertices(), std::vector<double>(values.size(), 0.0));
            for (std::size_t v = 0; v < feats.size(); ++v) {
                const auto idx = std::lower_bound(values.begin(), values.end(), ds.node_labels[gi][v]) - values.begin();
                feats[v][static_cast<std::size_t>(idx)] = 1.0;
            }
            ds.graphs[gi].set_features(std::move(feats));
        }
        return ds;
    }
    if (degree_cap < 1) throw InvalidArgument("degree cap must be at least 1");
    std::size_t max_degree = 0;
    for (const auto& g : ds.graphs)
        for (std::size_t v = 0; v < g.num_vertices(); ++v) max_degree = std::max(max_degree, g.degree(v));
    const std::size_t dim = std::min(max_degree + 1, degree_cap);
    for (auto& g : ds.graphs) {
        std::vector<std::vector<double>> feats(g.num_vertices(), std::vector<double>(dim, 0.0));
        for (std::size_t v = 0; v < g.num_vertices(); ++v) feats[v][std::min(g.degree(v), dim - 1)] = 1.0;
        g.set_features(std::move(feats));
    }
    return ds;
}

struct DatasetStats {
    std::size_t num_graphs = 0;
    std::size_t num_classes = 0;
    double avg_nodes = 0.0;
    double avg_edges = 0.0;
    double avg_degree = 0.0;       // mean over graphs of the mean vertex degree
    double edges_per_node = 0.0;   // avg_edges / avg_nodes
    std::size_t max_degree = 0;
    std::size_t feature_dim = 0;   // 0 before featurization
    std::vector<std::size_t> class_sizes;
};

inline DatasetStats dataset_stats(const GraphDataset& ds) {
    DatasetStats st;
    st.num_graphs = ds.graphs.size();
    st.num_classes = ds.class_count;
    st.class_sizes.assign(ds.class_count, 0);
    if (ds.graphs.empty()) return st;
    for (std::size_t gi = 0; gi < ds.graphs.size(); ++gi) {
        const auto& g = ds.graphs[gi];
        st.avg_nodes += static_cast<double>(g.num_vertices());
        st.avg_edges += static_cast<double>(g.num_edges());
        if (g.num_vertices() > 0)
            st.avg_degree += 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_vertices());
        for (std::size_t v = 0; v < g.num_vertices(); ++v) st.max_degree = std::max(st.max_degree, g.degree(v));
        ++st.class_sizes[static_cast<std::size_t>(ds.labels[gi])];
    }
    const auto n = static_cast<double>(ds.graphs.size());
    st.avg_nodes /= n;
    st.avg_edges /= n;
    st.avg_degree /= n;
    st.edges_per_node = st.avg_nodes > 0.0 ? st.avg_edges / st.avg_nodes : 0.0;
    st.feature_dim = ds.graphs.front().feature_dim();
    return st;
}

// ---------------------------------------------------------------------------
// tensor export

struct ManifestEntry {
    std::size_t index = 0;
    long graph_id = 0;
    std::uint64_t seed = 0;
    int label = 0;
    std::size_t vertices = 0;
    std::size_t lost = 0;
};

struct Manifest {
    std::string dataset;
    std::string tensor_file;
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::size_t class_count = 0;
    std::vector<ManifestEntry> entries;
};

inline nlohmann::ordered_json to_json(const Manifest& m) {
    nlohmann::ordered_json j = {{"dataset", m.dataset}, {"tensor_file", m.tensor_file}, {"height", m.height},
                                {"width", m.width},     {"channels", m.channels},       {"class_count", m.class_count},
                                {"count", m.entries.size()}};
    auto& arr = j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : m.entries)
        arr.push_back({{"index", e.index}, {"graph_id", e.graph_id}, {"seed", e.seed},
                       {"label", e.label}, {"vertices", e.vertices}, {"lost", e.lost}});
    return j;
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
    Manifest m;
    m.dataset = j.at("dataset").get<std::string>();
    m.tensor_file = j.at("tensor_file").get<std::string>();
    m.height = j.at("height").get<std::size_t>();
    m.width = j.at("width").get<std::size_t>();
    m.channels = j.at("channels").get<std::size_t>();
    m.class_count = j.at("class_count").get<std::size_t>();
    for (const auto& e : j.at("entries"))
        m.entries.push_back({e.at("index").get<std::size_t>(), e.at("graph_id").get<long>(), e.at("seed").get<std::uint64_t>(),
                             e.at("label").get<int>(), e.at("vertices").get<std::size_t>(), e.at("lost").get<std::size_t>()});
    return m;
}

inline std::string manifest_path_for(const std::string& tensor_path) { return tensor_path + ".json"; }

/// Builds one tensor per successful layout and writes the container to
/// `path` and the manifest next to it (`path` + ".json"). Nothing is
/// written if any tensor fails to build.
inline Manifest export_tensors(const std::vector<AugmentedSet>& sets, const GraphDataset& ds, const std::string& path,
                               Window window = {}, MergeRule merge = MergeRule::average) {
    if (sets.empty()) throw InvalidArgument("nothing to export: empty set list");
    Manifest m;
    m.dataset = ds.name;
    m.tensor_file = std::filesystem::path(path).filename().string();
    m.height = window.height;
    m.width = window.width;
    m.class_count = ds.class_count;
    std::vector<GridTensor> tensors;
    for (const auto& set : sets) {
        if (set.graph_id < 0 || static_cast<std::size_t>(set.graph_id) >= ds.graphs.size())
            throw IndexError("graph id " + std::to_string(set.graph_id) + " not in dataset");
        const auto& g = ds.graphs[static_cast<std::size_t>(set.graph_id)];
        if (!g.has_features()) throw InvalidArgument("dataset must be featurized before export");
        for (const auto& l : set.layouts) {
            if (l.failed) continue;
            try {
                auto [t, rep] = build_grid_tensor(l.cells, g.features(), window, merge);
                m.entries.push_back({tensors.size(), set.graph_id, l.seed, ds.labels[static_cast<std::size_t>(set.graph_id)],
                                     rep.graph_vertex_count, rep.lost});
                tensors.push_back(std::move(t));
            } catch (const WindowOverflow& e) {
                throw WindowOverflow("graph " + std::to_string(set.graph_id) + ": " + e.what(), set.graph_id);
            }
        }
    }
    if (tensors.empty()) throw InvalidArgument("nothing to export: every layout failed");
    m.channels = tensors.front().channels;
    write_tensor_container(path, tensors);
    std::ofstream out(manifest_path_for(path), std::ios::trunc);
    if (!out) throw IoError("cannot open " + manifest_path_for(path) + " for writing");
    out << to_json(m).dump(2) << '\n';
    if (!out) throw IoError("failed writing " + manifest_path_for(path));
    return m;
}

inline Manifest load_manifest(const std::string& tensor_path) {
    std::ifstream in(manifest_path_for(tensor_path));
    if (!in) throw IoError("cannot open " + manifest_path_for(tensor_path));
    try {
        return manifest_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(manifest_path_for(tensor_path), 1, e.what());
    }
}

}  // namespace gpgl
