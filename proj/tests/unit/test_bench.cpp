#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bmdp/bench.hpp"
#include "bmdp/suite.hpp"

using namespace bmdp;

TEST(Suite, Contents) {
    const auto suite = embedded_suite();
    ASSERT_EQ(suite.size(), 3u + kSuiteSeeds.size());
    EXPECT_EQ(suite[0].name, "cloud1");
    EXPECT_EQ(suite[2].name, "cloud2_p50");
    EXPECT_EQ(suite[3].name, "rand_seed7");
    for (const auto& nm : suite) EXPECT_TRUE(validate(nm.model).empty()) << nm.name;
}

TEST(Trials, SeedsAreDistinctAndStable) {
    EXPECT_EQ(trial_seed(5, 0), trial_seed(5, 0));
    EXPECT_NE(trial_seed(5, 0), trial_seed(5, 1));
    EXPECT_NE(trial_seed(5, 0), trial_seed(6, 0));
}

TEST(Trials, ThreadCountDoesNotChangeResults) {
    LearnParams p;
    p.ep_n = 300;
    p.seed = 9;
    const TrialSet one = run_trials(cloud2(), p, 3, 1);
    const TrialSet three = run_trials(cloud2(), p, 3, 3);
    EXPECT_EQ(one.seeds, three.seeds);
    ASSERT_EQ(one.results.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(one.results[i].q, three.results[i].q);
    EXPECT_EQ(one.mean_estimate, three.mean_estimate);
}

TEST(BenchModel, Cloud1Row) {
    LearnParams p;
    p.seed = 1;
    const BenchRow row = bench_model("cloud1", cloud1(), p, 3);
    EXPECT_EQ(row.status, "ok");
    EXPECT_EQ(row.types, 2u);
    EXPECT_NEAR(row.optimal_cost, 5.8, 1e-9);
    EXPECT_NEAR(row.estimated_cost, 5.8, 0.05 * 5.8);
    EXPECT_EQ(row.trial_estimates.size(), 3u);
    EXPECT_EQ(row.ep_l, 30u);
    EXPECT_EQ(row.ep_n, 20000u);
    EXPECT_EQ(row.learned_strategy, (StaticStrategy{ActionId{0}, ActionId{0}}));
}

TEST(BenchModel, DivergentRowSkipsLearning) {
    const BenchRow row = bench_model("cloud2_p50", cloud2_p50(), LearnParams{}, 3);
    EXPECT_EQ(row.status, "inf/diverged");
    EXPECT_NEAR(row.optimal_cost, 6.0, 1e-9);
    EXPECT_TRUE(std::isinf(row.exact_values[2]));
    EXPECT_TRUE(std::isnan(row.estimated_cost));
    EXPECT_TRUE(row.trial_estimates.empty());
}

TEST(BenchOutput, TableAndCsv) {
    BenchRow row;
    row.name = "m";
    row.types = 2;
    row.optimal_cost = 5.8;
    row.estimated_cost = 5.75;
    row.time_seconds = 0.25;
    row.ep_l = 30;
    row.ep_n = 20000;
    std::ostringstream csv;
    write_bench_csv(csv, {row});
    EXPECT_EQ(csv.str(), "name,types,optimal_cost,estimated_cost,time_seconds,ep_l,ep_n,status\n"
                         "m,2,5.8,5.75,0.25,30,20000,ok\n");
    std::ostringstream table;
    write_bench_table(table, {row});
    EXPECT_NE(table.str().find("optimal cost"), std::string::npos);
    EXPECT_NE(table.str().find("0.250"), std::string::npos);

    std::ostringstream empty;
    write_bench_table(empty, {});
    const std::string header = empty.str();
    EXPECT_EQ(std::count(header.begin(), header.end(), '\n'), 1);
}

TEST(BenchOutput, CurveCsv) {
    std::ostringstream os;
    write_curve_csv(os, {{1, 2.5}, {2, 3.0}});
    EXPECT_EQ(os.str(), "episode,estimate\n1,2.5\n2,3\n");
}

TEST(FormatValue, SpecialValues) {
    EXPECT_EQ(format_value(INFINITY), "inf");
    EXPECT_EQ(format_value(NAN), "nan");
    EXPECT_EQ(format_value(0.25), "0.25");
    EXPECT_EQ(format_value(5.0 / 3.0), "1.666666667");
}
