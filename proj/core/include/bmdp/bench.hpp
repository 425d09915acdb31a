#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bmdp/model.hpp"
#include "bmdp/qlearner.hpp"
#include "bmdp/solver.hpp"

namespace bmdp {

/// Seed of trial `trial` derived from a master seed.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) noexcept;

struct TrialSet {
    std::vector<std::uint64_t> seeds;
    std::vector<LearnResult> results;
    std::vector<double> seconds;
    double mean_estimate = 0.0;
    double mean_seconds = 0.0;
    /// Entry-wise mean of the trials' final tables.
    QTable mean_q;
    /// Greedy strategy of mean_q at the learner's tolerance.
    StaticStrategy strategy;
};

/// Independent learning runs with seeds trial_seed(params.seed, i). Results are
/// stored in trial order whatever the number of threads.
[[nodiscard]] TrialSet run_trials(const Bmdp& model, const LearnParams& params, std::size_t trials,
                                  unsigned threads = 1);

/// One line of the results table.
struct BenchRow {
    std::string name;
    std::size_t types = 0;
    /// Exact value of the initial configuration; +inf when divergent.
    double optimal_cost = 0.0;
    /// Mean learned estimate; NaN when learning was skipped.
    double estimated_cost = 0.0;
    double time_seconds = 0.0;
    std::size_t ep_l = 0;
    std::size_t ep_n = 0;
    /// "ok", "inf/diverged", "not converged", or an error message.
    std::string status = "ok";

    ValueVector exact_values;
    StaticStrategy exact_strategy;
    std::vector<double> trial_estimates;
    StaticStrategy learned_strategy;
};

/// Solves the model exactly and, when every type has a finite value, learns
/// it with `trials` runs. A model with an infinite type gets the status
/// "inf/diverged" and no learning.
[[nodiscard]] BenchRow bench_model(const std::string& name, const Bmdp& model, const LearnParams& params,
                                   std::size_t trials, const SolveParams& solve = {}, unsigned threads = 1);

/// Fixed-width text table with the columns of BenchRow.
void write_bench_table(std::ostream& out, const std::vector<BenchRow>& rows);

/// name,types,optimal_cost,estimated_cost,time_seconds,ep_l,ep_n,status
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

/// episode,estimate
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

/// Shortest decimal text for a value; "inf" for +inf, "nan" for NaN.
[[nodiscard]] std::string format_value(double v);

}  // namespace bmdp
