#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "gpgl/augment.hpp"
#include "gpgl/dataset.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
namespace ts = testing_support;

namespace {

const std::string kMutag = std::string(GPGL_TEST_DATA) + "/MUTAG";

// Writes a TUDataset directory from in-memory file contents.
fs::path write_fixture(const std::string& dir_name, const std::map<std::string, std::string>& files) {
    const auto dir = fs::temp_directory_path() / ("gpgl_fixture_" + dir_name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const auto& [name, body] : files) std::ofstream(dir / name) << body;
    return dir;
}

// Graph 1: triangle on nodes 1,2,3 (each edge listed both ways, one self-loop).
// Graph 2: path 4-5 plus isolated node 6.
fs::path toy_dataset(bool with_node_labels = true) {
    std::map<std::string, std::string> files{
        {"TOY_A.txt", "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n3, 3\n4, 5\n5, 4\n"},
        {"TOY_graph_indicator.txt", "1\n1\n1\n2\n2\n2\n"},
        {"TOY_graph_labels.txt", "-1\n1\n"},
    };
    if (with_node_labels) files["TOY_node_labels.txt"] = "0\n2\n2\n5\n0\n2\n";
    return write_fixture(with_node_labels ? "toy" : "toy_nolabels", files);
}

}  // namespace

TEST(Loader, ToyFixture) {
    const auto ds = gpgl::load_tudataset(toy_dataset());
    EXPECT_EQ(ds.name, "TOY");
    ASSERT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds.graphs[0], gpgl::Graph(3, {{0, 1}, {1, 2}, {0, 2}}));
    EXPECT_EQ(ds.graphs[1], gpgl::Graph(3, {{0, 1}}));
    EXPECT_EQ(ds.labels, (std::vector<int>{0, 1}));
    EXPECT_EQ(ds.label_values, (std::vector<long>{-1, 1}));
    EXPECT_EQ(ds.class_count, 2u);
    EXPECT_EQ(ds.node_labels, (std::vector<std::vector<long>>{{0, 2, 2}, {5, 0, 2}}));
}

TEST(Loader, ReportsParseErrorsWithLineNumbers) {
    const auto dir = write_fixture("bad_edge", {{"BAD_A.txt", "1, 2\n2; 1\n"},
                                                {"BAD_graph_indicator.txt", "1\n1\n"},
                                                {"BAD_graph_labels.txt", "0\n"}});
    try {
        gpgl::load_tudataset(dir);
        FAIL() << "expected ParseError";
    } catch (const gpgl::ParseError& e) {
        EXPECT_EQ(e.line_number, 2u);
    }
}

TEST(Loader, OutOfRangeIndicesAreIndexErrors) {
    auto dir = write_fixture("bad_indicator", {{"BAD_A.txt", "1, 2\n"},
                                               {"BAD_graph_indicator.txt", "1\n3\n"},
                                               {"BAD_graph_labels.txt", "0\n"}});
    EXPECT_THROW(gpgl::load_tudataset(dir), gpgl::IndexError);
    dir = write_fixture("bad_node", {{"BAD_A.txt", "1, 7\n"},
                                     {"BAD_graph_indicator.txt", "1\n1\n"},
                                     {"BAD_graph_labels.txt", "0\n"}});
    EXPECT_THROW(gpgl::load_tudataset(dir), gpgl::IndexError);
}

TEST(Loader, CrossGraphEdgeIsRejected) {
    const auto dir = write_fixture("cross", {{"X_A.txt", "1, 2\n"},
                                             {"X_graph_indicator.txt", "1\n2\n"},
                                             {"X_graph_labels.txt", "0\n1\n"}});
    EXPECT_THROW(gpgl::load_tudataset(dir), gpgl::ParseError);
}

TEST(Loader, MissingDirectoryOrFiles) {
    EXPECT_THROW(gpgl::load_tudataset("/nonexistent/gpgl"), gpgl::IoError);
    const auto dir = write_fixture("nolabels", {{"Y_A.txt", "1, 2\n"}, {"Y_graph_indicator.txt", "1\n1\n"}});
    EXPECT_THROW(gpgl::load_tudataset(dir), gpgl::IoError);
}

TEST(Loader, Mutag) {
    const auto ds = gpgl::load_tudataset(kMutag);
    EXPECT_EQ(ds.name, "MUTAG");
    EXPECT_EQ(ds.size(), 188u);
    EXPECT_EQ(ds.class_count, 2u);
    for (std::size_t gi = 0; gi < ds.size(); ++gi) {
        const auto& g = ds.graphs[gi];
        if (g.num_vertices() > 50) continue;
        const auto oracle = ts::floyd_warshall(g);
        if (!gpgl::is_connected(g)) continue;
        const auto d = gpgl::shortest_path_distances(g);
        for (std::size_t i = 0; i < g.num_vertices(); ++i)
            for (std::size_t j = 0; j < g.num_vertices(); ++j) ASSERT_EQ(d(i, j), oracle[i][j]);
    }
}

TEST(Featurize, LabelOneHot) {
    const auto ds = gpgl::featurize(gpgl::load_tudataset(toy_dataset()), gpgl::FeatureMode::one_hot_label);
    // distinct labels {0, 2, 5}
    EXPECT_EQ(ds.graphs[0].feature_dim(), 3u);
    EXPECT_EQ(ds.graphs[1].features()[0], (std::vector<double>{0, 0, 1}));
    EXPECT_EQ(ds.graphs[0].features()[1], (std::vector<double>{0, 1, 0}));
}

TEST(Featurize, MissingLabels) {
    const auto raw = gpgl::load_tudataset(toy_dataset(false));
    EXPECT_THROW(gpgl::featurize(raw, gpgl::FeatureMode::one_hot_label), gpgl::MissingNodeLabels);
    const auto ds = gpgl::featurize(raw, gpgl::FeatureMode::automatic);
    EXPECT_EQ(ds.graphs[0].feature_dim(), 3u);  // max degree 2
}

TEST(Featurize, StarDegreeOneHot) {
    gpgl::GraphDataset ds;
    ds.graphs = {ts::star(5)};
    ds.labels = {0};
    ds.class_count = 1;
    ds = gpgl::featurize(ds, gpgl::FeatureMode::one_hot_degree);
    const auto& f = ds.graphs[0].features();
    ASSERT_EQ(f[0].size(), 6u);
    EXPECT_EQ(f[0][5], 1.0);
    for (std::size_t v = 1; v <= 5; ++v) EXPECT_EQ(f[v][1], 1.0);
}

TEST(Featurize, DegreeCapBucketsOverflow) {
    gpgl::GraphDataset ds;
    ds.graphs = {ts::star(9)};
    ds.labels = {0};
    ds.class_count = 1;
    ds = gpgl::featurize(ds, gpgl::FeatureMode::one_hot_degree, 4);
    EXPECT_EQ(ds.graphs[0].features()[0], (std::vector<double>{0, 0, 0, 1}));
}

TEST(Featurize, VectorsAreExactOneHot) {
    for (auto mode : {gpgl::FeatureMode::one_hot_label, gpgl::FeatureMode::one_hot_degree}) {
        const auto ds = gpgl::featurize(gpgl::load_tudataset(kMutag), mode);
        for (const auto& g : ds.graphs)
            for (const auto& f : g.features()) {
                double sum = 0;
                for (auto x : f) {
                    EXPECT_TRUE(x == 0.0 || x == 1.0);
                    sum += x;
                }
                EXPECT_EQ(sum, 1.0);
            }
    }
    EXPECT_EQ(gpgl::featurize(gpgl::load_tudataset(kMutag), gpgl::FeatureMode::automatic).graphs[0].feature_dim(), 7u);
    EXPECT_THROW(gpgl::parse_feature_mode("bogus"), gpgl::InvalidArgument);
}

TEST(Stats, SingleTriangle) {
    gpgl::GraphDataset ds;
    ds.graphs = {ts::complete(3)};
    ds.labels = {0};
    ds.class_count = 1;
    const auto st = gpgl::dataset_stats(ds);
    EXPECT_EQ(st.avg_nodes, 3.0);
    EXPECT_EQ(st.avg_edges, 3.0);
    EXPECT_EQ(st.max_degree, 2u);
    EXPECT_EQ(st.avg_degree, 2.0);
    EXPECT_EQ(st.edges_per_node, 1.0);
}

TEST(Stats, Mutag) {
    const auto ds = gpgl::featurize(gpgl::load_tudataset(kMutag), gpgl::FeatureMode::automatic);
    const auto st = gpgl::dataset_stats(ds);
    EXPECT_EQ(st.num_graphs, 188u);
    EXPECT_EQ(st.num_classes, 2u);
    EXPECT_NEAR(st.avg_nodes, 17.93, 0.01);
    EXPECT_NEAR(st.avg_edges, 19.79, 0.01);
    EXPECT_NEAR(st.edges_per_node, 1.10, 0.01);
    EXPECT_EQ(st.feature_dim, 7u);
    EXPECT_EQ(st.class_sizes, (std::vector<std::size_t>{63, 125}));
    // The distributed files peak at degree 4; the reference statistic is 8.
    EXPECT_EQ(st.max_degree, 4u);
}

TEST(Export, RoundTripAndManifest) {
    const auto ds = gpgl::featurize(gpgl::load_tudataset(toy_dataset()), gpgl::FeatureMode::automatic);
    std::vector<gpgl::AugmentedSet> sets;
    for (std::size_t gi = 0; gi < ds.size(); ++gi) sets.push_back(gpgl::augment(ds.graphs[gi], gpgl::LayoutParams{}, 3, static_cast<long>(gi)));
    const auto path = (fs::temp_directory_path() / "gpgl_export.bin").string();
    const auto m = gpgl::export_tensors(sets, ds, path, {8, 8});
    EXPECT_EQ(m.entries.size(), 6u);
    EXPECT_EQ(m.channels, 3u);

    const auto loaded = gpgl::load_manifest(path);
    EXPECT_EQ(gpgl::to_json(loaded), gpgl::to_json(m));
    const auto c = gpgl::read_tensor_container(path);
    ASSERT_EQ(c.count, 6u);
    for (const auto& e : m.entries) {
        const auto& set = sets[static_cast<std::size_t>(e.graph_id)];
        const auto it = std::find_if(set.layouts.begin(), set.layouts.end(), [&](const auto& l) { return l.seed == e.seed; });
        ASSERT_NE(it, set.layouts.end());
        const auto& layout = *it;
        const auto t = gpgl::build_grid_tensor(layout.cells, ds.graphs[static_cast<std::size_t>(e.graph_id)].features(), {8, 8}).first;
        EXPECT_EQ(0, std::memcmp(c.tensor(e.index), t.data.data(), t.data.size() * sizeof(float)));
        EXPECT_EQ(e.label, ds.labels[static_cast<std::size_t>(e.graph_id)]);
    }
}

TEST(Export, SkipsFailedLayouts) {
    const auto ds = gpgl::featurize(gpgl::load_tudataset(toy_dataset()), gpgl::FeatureMode::automatic);
    std::vector<gpgl::AugmentedSet> sets{gpgl::augment(ds.graphs[0], gpgl::LayoutParams{}, 3, 0)};
    sets[0].layouts[1].failed = true;
    const auto m = gpgl::export_tensors(sets, ds, (fs::temp_directory_path() / "gpgl_export_failed.bin").string(), {8, 8});
    EXPECT_EQ(m.entries.size(), 2u);
    EXPECT_EQ(m.entries[1].seed, 2u);
}

TEST(Export, EmptyListWritesNothing) {
    const auto ds = gpgl::featurize(gpgl::load_tudataset(toy_dataset()), gpgl::FeatureMode::automatic);
    const auto path = (fs::temp_directory_path() / "gpgl_export_empty.bin").string();
    fs::remove(path);
    fs::remove(gpgl::manifest_path_for(path));
    EXPECT_THROW(gpgl::export_tensors({}, ds, path), gpgl::InvalidArgument);
    EXPECT_FALSE(fs::exists(path));
    EXPECT_FALSE(fs::exists(gpgl::manifest_path_for(path)));
}

TEST(Export, WindowOverflowCarriesGraphId) {
    const auto ds = gpgl::featurize(gpgl::load_tudataset(toy_dataset()), gpgl::FeatureMode::automatic);
    std::vector<gpgl::AugmentedSet> sets{gpgl::augment(ds.graphs[1], gpgl::LayoutParams{}, 1, 1)};
    const auto path = (fs::temp_directory_path() / "gpgl_export_overflow.bin").string();
    fs::remove(path);
    try {
        gpgl::export_tensors(sets, ds, path, {1, 1});
        FAIL() << "expected WindowOverflow";
    } catch (const gpgl::WindowOverflow& e) {
        EXPECT_EQ(e.graph_id, 1);
    }
    EXPECT_FALSE(fs::exists(path));
}

TEST(Export, RequiresFeatures) {
    const auto ds = gpgl::load_tudataset(toy_dataset());
    std::vector<gpgl::AugmentedSet> sets{gpgl::augment(ds.graphs[0], gpgl::LayoutParams{}, 1, 0)};
    EXPECT_THROW(gpgl::export_tensors(sets, ds, (fs::temp_directory_path() / "gpgl_nofeat.bin").string()), gpgl::InvalidArgument);
}
