#include <gtest/gtest.h>

#include "gpgl/graph.hpp"
#include "support.hpp"

namespace ts = testing_support;
using gpgl::Graph;

TEST(Graph, NormalizesAndSortsEdges) {
    const Graph g(4, {{2, 1}, {0, 3}, {1, 0}});
    const std::vector<gpgl::Edge> want{{0, 1}, {0, 3}, {1, 2}};
    EXPECT_EQ(g.edges(), want);
    EXPECT_EQ(g.degree(0), 2u);
    EXPECT_EQ(g.neighbors(1), (std::vector<std::size_t>{0, 2}));
}

TEST(Graph, RejectsInvalidEdges) {
    EXPECT_THROW(Graph(3, {{0, 3}}), gpgl::InvalidArgument);
    EXPECT_THROW(Graph(3, {{1, 1}}), gpgl::InvalidArgument);
    EXPECT_THROW(Graph(3, {{0, 1}, {1, 0}}), gpgl::InvalidArgument);
}

TEST(Graph, FeaturesMustBeUniform) {
    Graph g(2, {{0, 1}});
    EXPECT_THROW(g.set_features({{1.0}}), gpgl::InvalidArgument);
    EXPECT_THROW(g.set_features({{1.0}, {1.0, 2.0}}), gpgl::InvalidArgument);
    EXPECT_THROW(g.set_features({{}, {}}), gpgl::InvalidArgument);
    g.set_features({{1.0, 0.0}, {0.0, 1.0}});
    EXPECT_EQ(g.feature_dim(), 2u);
}

TEST(ShortestPaths, PathGraph) {
    const auto d = gpgl::shortest_path_distances(ts::path(3));
    EXPECT_EQ(d(0, 2), 2u);
    EXPECT_EQ(d(2, 0), 2u);
}

TEST(ShortestPaths, CompleteGraphIsAllOnes) {
    const auto d = gpgl::shortest_path_distances(ts::complete(9));
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 9; ++j) EXPECT_EQ(d(i, j), i == j ? 0u : 1u);
}

TEST(ShortestPaths, SixCycle) {
    const auto d = gpgl::shortest_path_distances(ts::cycle(6));
    EXPECT_EQ(d(0, 3), 3u);
    EXPECT_EQ(d(1, 5), 2u);
}

TEST(ShortestPaths, DisconnectedThrows) {
    EXPECT_THROW(gpgl::shortest_path_distances(Graph(3, {{0, 1}})), gpgl::DisconnectedGraph);
}

TEST(ShortestPaths, MatchesFloydWarshallOnRandomGraphs) {
    gpgl::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 2 + static_cast<std::size_t>(rng.below(49));
        const auto g = ts::random_connected_graph(n, rng.uniform(0.0, 0.3), rng);
        const auto d = gpgl::shortest_path_distances(g);
        const auto oracle = ts::floyd_warshall(g);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) ASSERT_EQ(d(i, j), oracle[i][j]) << "trial " << trial;
    }
}

TEST(ShortestPaths, MetricProperties) {
    gpgl::Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = 2 + static_cast<std::size_t>(rng.below(20));
        const auto d = gpgl::shortest_path_distances(ts::random_connected_graph(n, 0.15, rng));
        for (std::size_t i = 0; i < n; ++i) {
            ASSERT_EQ(d(i, i), 0u);
            for (std::size_t j = 0; j < n; ++j) {
                ASSERT_EQ(d(i, j), d(j, i));
                if (i != j) ASSERT_GE(d(i, j), 1u);
                for (std::size_t k = 0; k < n; ++k) ASSERT_LE(d(i, j), d(i, k) + d(k, j));
            }
        }
    }
}

TEST(Components, ConnectedGraphIsOneComponent) {
    const auto g = ts::cycle(5);
    const auto comps = gpgl::connected_components(g);
    ASSERT_EQ(comps.size(), 1u);
    EXPECT_EQ(comps[0].graph, g);
    EXPECT_EQ(comps[0].vertices, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(Components, TwoTriangles) {
    const Graph g(6, {{0, 2}, {2, 4}, {0, 4}, {1, 3}, {3, 5}, {1, 5}});
    const auto comps = gpgl::connected_components(g);
    ASSERT_EQ(comps.size(), 2u);
    for (const auto& c : comps) {
        EXPECT_EQ(c.graph.num_vertices(), 3u);
        EXPECT_EQ(c.graph.num_edges(), 3u);
    }
    EXPECT_EQ(comps[0].vertices, (std::vector<std::size_t>{0, 2, 4}));
    EXPECT_EQ(comps[1].vertices, (std::vector<std::size_t>{1, 3, 5}));
}

TEST(Components, EdgelessGraphGivesSingletons) {
    const auto comps = gpgl::connected_components(Graph(4, {}));
    ASSERT_EQ(comps.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(comps[i].graph.num_vertices(), 1u);
        EXPECT_EQ(comps[i].vertices, std::vector<std::size_t>{i});
    }
}

TEST(Components, RemappingIsABijectionAndKeepsEdges) {
    gpgl::Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = 1 + static_cast<std::size_t>(rng.below(30));
        auto g = ts::random_graph(n, 0.08, rng);
        std::vector<std::vector<double>> feats(n);
        for (std::size_t v = 0; v < n; ++v) feats[v] = {static_cast<double>(v)};
        g.set_features(feats);
        const auto comps = gpgl::connected_components(g);
        std::vector<int> seen(n, 0);
        std::size_t edges = 0;
        for (const auto& c : comps) {
            ASSERT_TRUE(gpgl::is_connected(c.graph));
            for (std::size_t k = 0; k < c.vertices.size(); ++k) {
                ++seen[c.vertices[k]];
                ASSERT_EQ(c.graph.features()[k][0], static_cast<double>(c.vertices[k]));
            }
            for (const auto& [a, b] : c.graph.edges()) {
                const auto& nb = g.neighbors(c.vertices[a]);
                ASSERT_TRUE(std::find(nb.begin(), nb.end(), c.vertices[b]) != nb.end());
            }
            edges += c.graph.num_edges();
        }
        for (auto s : seen) ASSERT_EQ(s, 1);
        ASSERT_EQ(edges, g.num_edges());
    }
}
