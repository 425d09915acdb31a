#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bmdp/model.hpp"
#include "bmdp/random.hpp"

namespace bmdp {

/// Draws an offspring list from p(q, a) by inverse CDF over the outcomes in
/// declaration order, consuming exactly one uniform draw.
/// Throws std::out_of_range if a is not an action of q.
[[nodiscard]] const Config& sample_offspring(const Bmdp& model, TypeId q, ActionId a, Rng& rng);

struct StepRecord {
    /// 1-based position of the expanded entity.
    std::size_t entity_index = 1;
    TypeId type;
    ActionId action;
    double cost = 0.0;
    Config offspring;
    Config next_config;
};

/// Expands the entity at 1-based `entity_index`: it is replaced in place by a
/// sampled offspring list and every other entity keeps its position.
/// Throws std::out_of_range on a bad index or action.
[[nodiscard]] StepRecord step(const Bmdp& model, const Config& config, std::size_t entity_index, ActionId a,
                              Rng& rng);

struct EpisodeResult {
    double total_cost = 0.0;
    std::size_t steps = 0;
    bool terminated = false;
    std::vector<StepRecord> trace;
};

/// Runs sigma from `start`, always expanding the first entity, until the
/// configuration is empty or `max_steps` steps were taken.
[[nodiscard]] EpisodeResult run_episode(const Bmdp& model, const Config& start, const StaticStrategy& sigma,
                                        std::size_t max_steps, Rng& rng, bool record_trace = false);

struct MonteCarloEstimate {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    /// Share of episodes cut off at max_steps; their partial cost is kept.
    double truncated_fraction = 0.0;
    std::size_t episodes = 0;
};

/// Mean total cost over independent episodes. Episode i draws from
/// rng.split(i), so the estimate does not depend on `threads`.
[[nodiscard]] MonteCarloEstimate monte_carlo_estimate(const Bmdp& model, const Config& start,
                                                      const StaticStrategy& sigma, std::size_t episodes,
                                                      std::size_t max_steps, const Rng& rng,
                                                      unsigned threads = 1);

/// One line per record: step, entity_index, type, action, cost, |next_config|,
/// tab separated.
void write_trace(std::ostream& out, const Bmdp& model, const std::vector<StepRecord>& trace);

}  // namespace bmdp
