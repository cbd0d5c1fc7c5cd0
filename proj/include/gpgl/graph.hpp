#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "gpgl/error.hpp"

namespace gpgl {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected simple graph with optional per-vertex feature vectors.
///
/// Edges are stored normalized (first < second) and sorted; construction
/// rejects self-loops, duplicates and out-of-range endpoints.
class Graph {
public:
    Graph() = default;

    Graph(std::size_t num_vertices, std::vector<Edge> edges)
        : n_(num_vertices), edges_(std::move(edges)) {
        for (auto& e : edges_) {
            if (e.first >= n_ || e.second >= n_)
                throw InvalidArgument("edge endpoint out of range");
            if (e.first == e.second) throw InvalidArgument("self-loop on vertex " + std::to_string(e.first));
            if (e.first > e.second) std::swap(e.first, e.second);
        }
        std::sort(edges_.begin(), edges_.end());
        if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
            throw InvalidArgument("duplicate edge");
        adjacency_.assign(n_, {});
        for (const auto& [a, b] : edges_) {
            adjacency_[a].push_back(b);
            adjacency_[b].push_back(a);
        }
        for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
    }

    std::size_t num_vertices() const noexcept { return n_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_.at(v); }
    std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }

    bool has_features() const noexcept { return !features_.empty(); }
    std::size_t feature_dim() const noexcept { return features_.empty() ? 0 : features_.front().size(); }
    const std::vector<std::vector<double>>& features() const noexcept { return features_; }

    void set_features(std::vector<std::vector<double>> features) {
        if (features.size() != n_) throw InvalidArgument("feature count does not match vertex count");
        if (n_ > 0) {
            const auto dim = features.front().size();
            if (dim == 0) throw InvalidArgument("feature dimension must be at least 1");
            for (const auto& f : features)
                if (f.size() != dim) throw InvalidArgument("features must share one dimension");
        }
        features_ = std::move(features);
    }

    bool operator==(const Graph&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::vector<std::vector<double>> features_;
};

/// Dense symmetric all-pairs hop-count matrix.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0) {}

    std::size_t size() const noexcept { return n_; }
    std::uint32_t operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    std::uint32_t& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
    const std::vector<std::uint32_t>& data() const noexcept { return d_; }

    bool operator==(const DistanceMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint32_t> d_;
};

namespace detail {

inline constexpr std::uint32_t unreached = std::numeric_limits<std::uint32_t>::max();

inline void bfs_from(const Graph& g, std::size_t source, std::vector<std::uint32_t>& dist) {
    dist.assign(g.num_vertices(), unreached);
    std::queue<std::size_t> frontier;
    dist[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
        const auto v = frontier.front();
        frontier.pop();
        for (auto w : g.neighbors(v)) {
            if (dist[w] == unreached) {
                dist[w] = dist[v] + 1;
                frontier.push(w);
            }
        }
    }
}

}  // namespace detail

/// Hop counts between every vertex pair, one BFS per source.
/// Throws DisconnectedGraph if some pair is unreachable.
inline DistanceMatrix shortest_path_distances(const Graph& g) {
    const auto n = g.num_vertices();
    DistanceMatrix out(n);
    std::vector<std::uint32_t> dist;
    for (std::size_t s = 0; s < n; ++s) {
        detail::bfs_from(g, s, dist);
        for (std::size_t t = 0; t < n; ++t) {
            if (dist[t] == detail::unreached)
                throw DisconnectedGraph("vertices " + std::to_string(s) + " and " + std::to_string(t) +
                                        " are in different components");
            out(s, t) = dist[t];
        }
    }
    return out;
}

/// A connected piece of a larger graph. vertices[k] is the original index
/// of local vertex k; features are carried over when present.
struct Component {
    Graph graph;
    std::vector<std::size_t> vertices;
};

/// Maximal connected subgraphs, ordered by their smallest original vertex.
inline std::vector<Component> connected_components(const Graph& g) {
    const auto n = g.num_vertices();
    std::vector<std::size_t> label(n, n);
    std::vector<Component> out;
    std::vector<std::uint32_t> dist;
    for (std::size_t s = 0; s < n; ++s) {
        if (label[s] != n) continue;
        detail::bfs_from(g, s, dist);
        Component comp;
        for (std::size_t v = 0; v < n; ++v) {
            if (dist[v] != detail::unreached) {
                label[v] = out.size();
                comp.vertices.push_back(v);
            }
        }
        out.push_back(std::move(comp));
    }

    std::vector<std::size_t> local(n);
    for (const auto& comp : out)
        for (std::size_t k = 0; k < comp.vertices.size(); ++k) local[comp.vertices[k]] = k;

    std::vector<std::vector<Edge>> edges(out.size());
    for (const auto& [a, b] : g.edges()) edges[label[a]].emplace_back(local[a], local[b]);

    for (std::size_t c = 0; c < out.size(); ++c) {
        auto& comp = out[c];
        comp.graph = Graph(comp.vertices.size(), std::move(edges[c]));
        if (g.has_features()) {
            std::vector<std::vector<double>> feats;
            feats.reserve(comp.vertices.size());
            for (auto v : comp.vertices) feats.push_back(g.features()[v]);
            comp.graph.set_features(std::move(feats));
        }
    }
    return out;
}

inline bool is_connected(const Graph& g) {
    if (g.num_vertices() <= 1) return true;
    std::vector<std::uint32_t> dist;
    detail::bfs_from(g, 0, dist);
    return std::none_of(dist.begin(), dist.end(), [](auto d) { return d == detail::unreached; });
}

}  // namespace gpgl
