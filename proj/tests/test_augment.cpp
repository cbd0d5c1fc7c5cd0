#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "gpgl/augment.hpp"
#include "gpgl/dataset.hpp"
#include "support.hpp"

namespace ts = testing_support;

TEST(Augment, SingleLayoutEqualsGpglLayout) {
    gpgl::Rng rng(51);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = ts::random_connected_graph(4 + rng.below(15), 0.1, rng);
        gpgl::LayoutParams p;
        p.seed = rng.below(1000);
        const auto set = gpgl::augment(g, p, 1, trial);
        ASSERT_EQ(set.layouts.size(), 1u);
        const auto direct = gpgl::gpgl_layout(g, p);
        EXPECT_EQ(set.layouts[0].cells, direct.cells);
        EXPECT_EQ(set.layouts[0].seed, p.seed);
        EXPECT_EQ(set.layouts[0].diagnostics.kk_loss, direct.diagnostics.kk_loss);
        EXPECT_EQ(set.graph_id, trial);
    }
}

TEST(Augment, SequentialSeedsAndDeterminism) {
    const auto g = ts::cycle(8);
    gpgl::LayoutParams p;
    p.seed = 40;
    const auto a = gpgl::augment(g, p, 6);
    const auto b = gpgl::augment(g, p, 6);
    ASSERT_EQ(a.layouts.size(), 6u);
    EXPECT_EQ(a.k, 6u);
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(a.layouts[i].seed, 40 + i);
        seeds.insert(a.layouts[i].seed);
        EXPECT_EQ(a.layouts[i].cells, b.layouts[i].cells);
        EXPECT_EQ(a.layouts[i].diagnostics.kk_loss, b.layouts[i].diagnostics.kk_loss);
        EXPECT_EQ(a.layouts[i].diagnostics.separation, b.layouts[i].diagnostics.separation);
        EXPECT_FALSE(a.layouts[i].failed);
        EXPECT_TRUE(std::isfinite(a.layouts[i].diagnostics.kk_loss));
        EXPECT_TRUE(std::isfinite(a.layouts[i].diagnostics.separation));
    }
    EXPECT_EQ(seeds.size(), 6u);
    EXPECT_EQ(a.succeeded(), 6u);
}

TEST(Augment, DisconnectedGraphsAreSupported) {
    const auto set = gpgl::augment(gpgl::Graph(5, {{0, 1}, {2, 3}}), gpgl::LayoutParams{}, 3);
    EXPECT_EQ(set.succeeded(), 3u);
}

TEST(Augment, RejectsZeroCount) {
    EXPECT_THROW(gpgl::augment(ts::path(3), gpgl::LayoutParams{}, 0), gpgl::InvalidArgument);
}

TEST(Augment, RetrySeedIsDistinct) {
    for (std::uint64_t s = 0; s < 100; ++s) EXPECT_NE(gpgl::retry_seed(s), s);
}

TEST(Augment, MutagLayoutsVaryAcrossSeeds) {
    const auto ds = gpgl::load_tudataset(std::string(GPGL_TEST_DATA) + "/MUTAG");
    std::size_t varied = 0;
    for (std::size_t gi = 0; gi < ds.size(); ++gi) {
        const auto set = gpgl::augment(ds.graphs[gi], gpgl::LayoutParams{}, 21, static_cast<long>(gi));
        ASSERT_EQ(set.layouts.size(), 21u);
        std::set<gpgl::GridLayout> distinct;
        for (const auto& l : set.layouts) distinct.insert(l.cells);
        varied += distinct.size() >= 2 ? 1 : 0;
    }
    EXPECT_GE(static_cast<double>(varied), 0.9 * static_cast<double>(ds.size()));
}
