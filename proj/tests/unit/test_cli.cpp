#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code = -1;
    std::string out;
};

Invocation run(const std::string& args) {
    const std::string cmd = std::string(BMDP_CLI_PATH) + " " + args + " 2>&1";
    Invocation r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string model(const std::string& name) { return std::string(BMDP_MODELS_DIR) + "/" + name + ".bmdp"; }

/// First number following `key` on the line that starts with it.
double number_after(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key, 0) == 0) return std::stod(line.substr(key.size()));
    ADD_FAILURE() << "no line starting with '" << key << "' in:\n" << text;
    return std::nan("");
}

/// Tokens of the line whose first token is `first`.
std::vector<std::string> row(const std::string& text, const std::string& first) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        for (std::string t; ls >> t;) tokens.push_back(t);
        if (!tokens.empty() && tokens[0] == first) return tokens;
    }
    return {};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("bmdp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SolveCloud1) {
    const Invocation r = run("solve " + model("cloud1"));
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(row(r.out, "T"), (std::vector<std::string>{"T", "5.8", "a1"}));
    EXPECT_EQ(row(r.out, "S"), (std::vector<std::string>{"S", "1.6", "a1"}));
    EXPECT_NE(r.out.find("iterations"), std::string::npos);
}

TEST_F(Cli, SolveCloud2) {
    const Invocation r = run("solve " + model("cloud2"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(row(r.out, "H")[1], "0.25");
    EXPECT_NEAR(std::stod(row(r.out, "S")[1]), 1.666667, 1e-6);
    EXPECT_EQ(row(r.out, "S")[2], "a2");
    EXPECT_EQ(row(r.out, "T"), (std::vector<std::string>{"T", "6", "a1"}));
}

TEST_F(Cli, SolveCriticalModel) {
    const Invocation r = run("solve " + model("cloud2_p50"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(row(r.out, "H")[1], "inf");
}

TEST_F(Cli, SolveIterationCapExitsWithTwo) {
    EXPECT_EQ(run("solve " + model("cloud2") + " --max-iter 2").code, 2);
}

TEST_F(Cli, SolveJsonSchema) {
    ASSERT_EQ(run("solve " + model("cloud2_p50") + " --json " + path("out.json")).code, 0);
    const auto j = nlohmann::json::parse(std::ifstream(path("out.json")));
    for (const char* key : {"model", "types", "exact", "learned", "params"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["model"], "cloud2_p50");
    EXPECT_EQ(j["types"], 3);
    EXPECT_EQ(j["exact"]["values"]["H"], "inf");
    EXPECT_EQ(j["exact"]["strategy"]["S"], "a2");
    EXPECT_TRUE(j["learned"].is_null());
}

TEST_F(Cli, ParseErrorsCarryLineAndColumn) {
    const std::string file = write("bad.bmdp", "type T {\n  action a cost 1.0 {\n    1.0: X;\n  }\n}\ninit T;\n");
    const Invocation r = run("solve " + file);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find(":3:10: UnknownType"), std::string::npos) << r.out;
    EXPECT_EQ(run("solve " + path("missing.bmdp")).code, 1);
}

TEST_F(Cli, UsageErrorsExitWithOne) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("solve").code, 1);
    EXPECT_EQ(run("learn " + model("cloud1") + " --schedule sometimes").code, 1);
    EXPECT_EQ(run("learn " + model("cloud1") + " --ep-n 0 --seed 1").code, 1);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, LearnCloud1ThreeTrials) {
    const Invocation r = run("learn " + model("cloud1") + " --trials 3 --seed 11 --csv " + path("curve.csv") +
                      " --json " + path("learn.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NEAR(number_after(r.out, "mean estimate"), 5.8, 0.05 * 5.8);
    EXPECT_LT(number_after(r.out, "time (avg.)"), 5.0);
    EXPECT_NE(r.out.find("learned strategy T:a1, S:a1"), std::string::npos) << r.out;
    for (int i = 1; i <= 3; ++i) EXPECT_TRUE(fs::exists(path("curve_trial" + std::to_string(i) + ".csv")));
    std::ifstream curve(path("curve_trial1.csv"));
    std::string header;
    std::getline(curve, header);
    EXPECT_EQ(header, "episode,estimate");

    const auto j = nlohmann::json::parse(std::ifstream(path("learn.json")));
    EXPECT_EQ(j["learned"]["trials"].size(), 3u);
    EXPECT_EQ(j["learned"]["strategy"]["T"], "a1");
    EXPECT_EQ(j["params"]["ep_n"], 20000);
    EXPECT_EQ(j["params"]["seed"], 11);
}

TEST_F(Cli, LearnIsDeterministicGivenSeed) {
    const std::string args = "learn " + model("cloud2") + " --trials 2 --ep-n 2000 --seed 5 --threads 2 --json ";
    ASSERT_EQ(run(args + path("a.json")).code, 0);
    ASSERT_EQ(run(args + path("b.json")).code, 0);
    const auto a = nlohmann::json::parse(std::ifstream(path("a.json")));
    const auto b = nlohmann::json::parse(std::ifstream(path("b.json")));
    EXPECT_EQ(a["learned"]["estimate"], b["learned"]["estimate"]);
    EXPECT_EQ(a["learned"]["trials"][1]["estimate"], b["learned"]["trials"][1]["estimate"]);
}

TEST_F(Cli, LearnWithoutSeedPrintsDrawnSeed) {
    const Invocation r = run("learn " + model("cloud1") + " --ep-n 10 --trials 1");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("seed ", 0), 0u) << r.out;
}

TEST_F(Cli, LearnUndertrained) {
    const Invocation r = run("learn " + model("cloud1") + " --ep-n 1 --seed 1");
    EXPECT_EQ(r.code, 0);
    EXPECT_GT(std::abs(number_after(r.out, "mean estimate") - 5.8), 0.5);
}

TEST_F(Cli, GenThenLearnWithCompare) {
    ASSERT_EQ(run("gen --seed 7 -o " + path("rand_seed7.bmdp")).code, 0);
    const Invocation r = run("learn " + path("rand_seed7.bmdp") + " --schedule harmonic --compare --seed 2");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_GE(number_after(r.out, "relative error"), 0.0);
    EXPECT_EQ(run("gen --seed 7").out, run("gen --seed 7").out);
}

TEST_F(Cli, GenRejectsBadParameters) { EXPECT_EQ(run("gen --seed 1 --types 0").code, 1); }

TEST_F(Cli, SimulateOptimal) {
    const Invocation r = run("simulate " + model("cloud1") + " --strategy optimal -n 100000 --seed 4");
    ASSERT_EQ(r.code, 0) << r.out;
    const double mean = number_after(r.out, "mean"), se = number_after(r.out, "stderr");
    EXPECT_LE(std::abs(mean - 5.8), 3 * se + 1e-9);
}

TEST_F(Cli, SimulateExplicitStrategy) {
    const Invocation r = run("simulate " + model("cloud1") + " --strategy T=a1,S=a2 -n 100000 --seed 4");
    ASSERT_EQ(r.code, 0) << r.out;
    const double mean = number_after(r.out, "mean"), se = number_after(r.out, "stderr");
    EXPECT_LT(std::abs(mean - 6.0), 4 * se);
    EXPECT_EQ(number_after(r.out, "truncated_fraction"), 0.0);
}

TEST_F(Cli, SimulateIncompleteStrategy) {
    const Invocation r = run("simulate " + model("cloud1") + " --strategy T=a2 --seed 1");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("missing strategy for type S"), std::string::npos) << r.out;
    EXPECT_EQ(run("simulate " + model("cloud1") + " --strategy T=a9,S=a1 --seed 1").code, 1);
}

TEST_F(Cli, SimulateTrace) {
    const Invocation r = run("simulate " + model("cloud1") + " --strategy optimal -n 10 --seed 1 --trace");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("episode total 5.8, 4 steps"), std::string::npos) << r.out;
}

TEST_F(Cli, BenchEmbeddedSuite) {
    const Invocation r = run("bench --seed 3 --csv " + path("bench.csv") + " --json " + path("bench.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    const auto cloud1 = row(r.out, "cloud1");
    ASSERT_GE(cloud1.size(), 4u) << r.out;
    EXPECT_EQ(cloud1[1], "2");
    EXPECT_EQ(cloud1[2], "5.8");
    EXPECT_NEAR(std::stod(cloud1[3]), 5.8, 0.05 * 5.8);
    EXPECT_EQ(row(r.out, "cloud2_p50").back(), "inf/diverged");
    EXPECT_FALSE(row(r.out, "rand_seed283").empty());

    std::ifstream csv(path("bench.csv"));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(csv, line)) ++lines;
    EXPECT_EQ(lines, 9u);

    const auto j = nlohmann::json::parse(std::ifstream(path("bench.json")));
    ASSERT_EQ(j.size(), 8u);
    for (const auto& rowj : j)
        for (const char* key : {"model", "types", "exact", "learned", "params"}) EXPECT_TRUE(rowj.contains(key));
    EXPECT_TRUE(j[2]["learned"].is_null());
}

TEST_F(Cli, BenchDirectory) {
    ASSERT_EQ(run("gen --seed 1 --types 3 -o " + path("a.bmdp")).code, 0);
    write("b.bmdp", "type T { action a cost 0 { 1.0: ; } } init T;");
    const Invocation r = run("bench " + dir_.string() + " --seed 1 --ep-n 200");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(row(r.out, "a")[1], "3");
    EXPECT_NE(r.out.find("error: 1:"), std::string::npos) << r.out;
}

TEST_F(Cli, BenchEmptyDirectory) {
    const Invocation r = run("bench " + dir_.string() + " --seed 1");
    EXPECT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line, last;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines, last = line;
    EXPECT_EQ(lines, 1u) << r.out;
    EXPECT_NE(last.find("optimal cost"), std::string::npos);
}
