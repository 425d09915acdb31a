#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bmdp/model.hpp"
#include "bmdp/random.hpp"

namespace bmdp {

/// The learner's view of a process: which types and actions exist, where
/// episodes start, and a way to try an action. Transition probabilities are
/// not part of this interface.
class Environment {
public:
    struct Transition {
        double cost;
        const Config& offspring;
    };

    virtual ~Environment() = default;

    [[nodiscard]] virtual std::size_t type_count() const = 0;
    [[nodiscard]] virtual std::size_t action_count(TypeId q) const = 0;
    [[nodiscard]] virtual const Config& initial() const = 0;
    [[nodiscard]] virtual Transition sample(TypeId q, ActionId a, Rng& rng) const = 0;

    [[nodiscard]] std::vector<std::size_t> action_counts() const;
};

/// Environment backed by a known model through the simulator.
class ModelEnvironment final : public Environment {
public:
    explicit ModelEnvironment(const Bmdp& model) : model_(model) {}

    [[nodiscard]] std::size_t type_count() const override { return model_.type_count(); }
    [[nodiscard]] std::size_t action_count(TypeId q) const override { return model_.action_count(q); }
    [[nodiscard]] const Config& initial() const override { return model_.init; }
    [[nodiscard]] Transition sample(TypeId q, ActionId a, Rng& rng) const override;

private:
    const Bmdp& model_;
};

enum class Schedule { Constant, Harmonic };

[[nodiscard]] std::string_view to_string(Schedule s) noexcept;

struct LearnParams {
    double epsilon = 0.1;
    double alpha = 0.1;
    Schedule schedule = Schedule::Constant;
    /// Q-values closer than this count as equal when extracting a strategy.
    double tol = 0.01;
    std::size_t ep_l = 30;
    std::size_t ep_n = 20000;
    std::uint64_t seed = 0;
    double q_init = 0.0;

    /// Throws std::invalid_argument when a field is out of range.
    void check() const;
};

/// alpha for Constant; alpha / (1 + 0.001 * visits) for Harmonic, where
/// visits counts earlier updates of the same pair.
[[nodiscard]] double learning_rate(const LearnParams& params, std::size_t visits) noexcept;

struct CurvePoint {
    std::size_t episode = 0;
    double estimate = 0.0;
};

struct LearnResult {
    QTable q;
    /// Sum over the initial configuration of min_a Q.
    double estimate = 0.0;
    StaticStrategy strategy;
    std::vector<CurvePoint> curve;
    std::size_t updates = 0;
};

/// Q(q, a) <- (1 - lambda) Q(q, a) + lambda (cost + sum over offspring of
/// min_a' Q(child, a')). No other entry changes.
void q_update(QTable& table, TypeId q, ActionId a, double cost, const Config& offspring, double lambda);

/// Model-based target: T(Q)(q, a) = c(q, a) + sum_alpha p(alpha) sum_i min Q(alpha_i, .).
[[nodiscard]] QTable apply_q_target(const Bmdp& model, const QTable& table);

/// Per type, the lowest-index action whose Q-value is within tol of the minimum.
[[nodiscard]] StaticStrategy extract_greedy_strategy(const QTable& table, double tol);

/// Episodic Q-learning. Each episode starts from the initial configuration
/// and runs for at most ep_l steps; a step picks an entity uniformly at
/// random, chooses an epsilon-greedy action for it, observes cost and
/// offspring, updates the table, and splices the offspring into place.
[[nodiscard]] LearnResult run_learning(const Environment& env, const LearnParams& params);
[[nodiscard]] LearnResult run_learning(const Bmdp& model, const LearnParams& params);

/// Synchronous-sampling learner: every step draws a (type, action) pair
/// uniformly at random and applies one sampled update to it.
class RandomUpdater {
public:
    RandomUpdater(const Environment& env, const LearnParams& params);
    /// Starts from `initial` instead of a table filled with params.q_init.
    RandomUpdater(const Environment& env, const LearnParams& params, QTable initial);

    void step();
    void run(std::size_t updates);

    [[nodiscard]] const QTable& table() const noexcept { return q_; }
    [[nodiscard]] std::size_t updates() const noexcept { return updates_; }
    /// Flat index of the pair changed by the last step.
    [[nodiscard]] std::size_t last_pair() const noexcept { return last_pair_; }

private:
    const Environment& env_;
    LearnParams params_;
    Rng rng_;
    QTable q_;
    std::vector<std::size_t> visits_;
    std::size_t updates_ = 0;
    std::size_t last_pair_ = 0;
};

[[nodiscard]] LearnResult run_random_update(const Environment& env, const LearnParams& params,
                                            std::size_t updates);
[[nodiscard]] LearnResult run_random_update(const Bmdp& model, const LearnParams& params, std::size_t updates);

/// Deterministic trajectory of the expected table under random updates:
/// E Q_{i+1} = Q_i + lambda_i p (T(Q_i) - Q_i). Exact only for chains, where
/// T is affine; throws std::invalid_argument for any type with several
/// actions. The result starts with q0 and has lambdas.size() + 1 entries.
[[nodiscard]] std::vector<QTable> expected_update_trajectory(const Bmdp& model, const QTable& q0,
                                                             std::span<const double> lambdas, double p);

}  // namespace bmdp
