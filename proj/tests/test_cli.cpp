#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int exit_code = 0;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "gpgl_cli_test";
    fs::create_directories(dir);
    return dir;
}

Run run(const std::string& args) {
    const auto out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
    const std::string cmd = std::string(GPGL_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

const std::string kData = std::string("--data-root ") + GPGL_TEST_DATA + " --dataset MUTAG";

}  // namespace

TEST(Cli, StatsJson) {
    const auto r = run("stats --json " + kData);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["graphs"], 188);
    EXPECT_EQ(j["classes"], 2);
    EXPECT_EQ(j["feature_dim"], 7);
}

TEST(Cli, StatsTable) {
    const auto r = run("stats " + kData);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("MUTAG"), std::string::npos);
    EXPECT_NE(r.out.find("188"), std::string::npos);
}

TEST(Cli, LayoutIsByteIdenticalAcrossRuns) {
    const auto a = scratch() / "a.jsonl", b = scratch() / "b.jsonl";
    ASSERT_EQ(run("layout " + kData + " --limit 5 --seed 3 --out " + a.string()).exit_code, 0);
    ASSERT_EQ(run("layout " + kData + " --limit 5 --seed 3 --out " + b.string()).exit_code, 0);
    const auto sa = slurp(a);
    EXPECT_EQ(sa, slurp(b));
    std::istringstream lines(sa);
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j["graph"], n);
        EXPECT_FALSE(j["failed"].get<bool>());
        ++n;
    }
    EXPECT_EQ(n, 5u);
    const auto summary = nlohmann::json::parse(slurp(a.string() + ".summary.json"));
    EXPECT_EQ(summary["graphs"], 5);
}

TEST(Cli, AugmentWritesKRecordsPerGraph) {
    const auto a = scratch() / "aug.jsonl";
    ASSERT_EQ(run("augment " + kData + " --graph 0 --graph 7 --k 3 --out " + a.string()).exit_code, 0);
    std::istringstream lines(slurp(a));
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j["graph"], n < 3 ? 0 : 7);
        EXPECT_EQ(j["seed"], n % 3);
        ++n;
    }
    EXPECT_EQ(n, 6u);
}

TEST(Cli, ExportAndTrainAreDeterministic) {
    const auto t1 = scratch() / "t1.bin", t2 = scratch() / "t2.bin";
    const std::string exp = "export " + kData + " --limit 40 --k 2 --window 16 --out ";
    ASSERT_EQ(run(exp + t1.string()).exit_code, 0);
    ASSERT_EQ(run(exp + t2.string()).exit_code, 0);
    EXPECT_EQ(slurp(t1), slurp(t2));
    const auto manifest = nlohmann::json::parse(slurp(t1.string() + ".json"));
    EXPECT_EQ(manifest["count"], 80);

    const std::string train = "train --tensors " + t1.string() +
                              " --conv 4,8 --fc 8 --scales 2 --epochs 2 --folds 4 --only-fold 0 --only-fold 2 --curve ";
    const auto c1 = scratch() / "c1.jsonl", c2 = scratch() / "c2.jsonl";
    const auto r1 = run(train + c1.string() + " --checkpoint-dir " + scratch().string());
    ASSERT_EQ(r1.exit_code, 0) << r1.err;
    const auto r2 = run(train + c2.string());
    ASSERT_EQ(r2.exit_code, 0) << r2.err;
    EXPECT_EQ(r1.out, r2.out);
    EXPECT_FALSE(slurp(c1).empty());
    EXPECT_EQ(slurp(c1), slurp(c2));
    EXPECT_TRUE(fs::exists(scratch() / "fold0.ckpt"));
    EXPECT_TRUE(fs::exists(scratch() / "fold2.ckpt"));
    const auto report = nlohmann::json::parse(r1.out);
    EXPECT_TRUE(report.contains("folds"));
}

TEST(Cli, RenderWritesOneSvgPerLayout) {
    const auto dir = scratch() / "svg";
    fs::remove_all(dir);
    ASSERT_EQ(run("render " + kData + " --graph 2 --k 2 --out " + dir.string()).exit_code, 0);
    EXPECT_TRUE(fs::exists(dir / "graph2_seed0.svg"));
    EXPECT_TRUE(fs::exists(dir / "graph2_seed1.svg"));
}

TEST(Cli, ErrorsAreReportedAsJson) {
    auto r = run("layout --dataset /nonexistent/dir --out " + (scratch() / "x.jsonl").string());
    EXPECT_EQ(r.exit_code, 2);
    auto j = nlohmann::json::parse(r.err);
    EXPECT_EQ(j["error"], "IoError");
    EXPECT_EQ(j["exit_code"], 2);

    r = run("export " + kData + " --limit 3 --window 2 --out " + (scratch() / "tiny.bin").string());
    EXPECT_EQ(r.exit_code, 2);
    j = nlohmann::json::parse(r.err);
    EXPECT_EQ(j["error"], "WindowOverflow");

    r = run("layout " + kData + " --alpha -1 --out " + (scratch() / "x.jsonl").string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "InvalidArgument");
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run("layout").exit_code, 1);
    EXPECT_EQ(run("frobnicate").exit_code, 1);
    EXPECT_EQ(run("--help").exit_code, 0);
}
