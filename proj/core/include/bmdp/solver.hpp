#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bmdp/model.hpp"

namespace bmdp {

/// Stopping rules for Kleene iteration.
struct SolveParams {
    double tolerance = 1e-9;
    std::size_t max_iterations = 1'000'000;
    /// Iterates above this bound are pinned to +inf.
    double divergence_threshold = 1e12;
    /// After convergence, re-evaluate the greedy strategy exactly and keep
    /// the result if it is at least as close to a fixed point.
    bool polish = true;

    /// Throws std::invalid_argument when a field is out of range.
    void check() const;
};

enum class SolveStatus { Converged, NotConverged };

struct SolveResult {
    ValueVector values;
    StaticStrategy strategy;
    std::size_t iterations = 0;
    /// False for infinite types and for types still moving at the iteration cap.
    std::vector<bool> converged_types;
    SolveStatus status = SolveStatus::NotConverged;
};

/// c(q, a) + sum over outcomes of p * (sum of x over the offspring), in
/// extended arithmetic (any term touching +inf yields +inf).
[[nodiscard]] double action_value(const Bmdp& model, TypeId q, ActionId a, std::span<const double> x);

/// One application of the optimality operator: per type, the minimum of
/// action_value over its actions.
[[nodiscard]] ValueVector apply_target(const Bmdp& model, std::span<const double> x);

/// Per type, the lowest-index action minimizing action_value at x.
[[nodiscard]] StaticStrategy greedy_strategy(const Bmdp& model, std::span<const double> x);

/// Optimal expected total cost per type, as the limit of x^0 = 0,
/// x^{k+1} = F(x^k).
///
/// Stops once the sup-norm change over finite components drops below
/// `params.tolerance`. Two heuristics mark components infinite:
///  - an iterate exceeding `params.divergence_threshold` is pinned to +inf;
///  - a growth certificate: if the current increment d = x^{k+1} - x^k
///    satisfies min_a (B_a d)_q >= d_q on a set of types (B_a being the
///    expected-offspring row of action a), the increments never shrink there
///    and those types grow without bound. This catches critical types whose
///    iterates grow only linearly.
/// With `params.polish`, converged finite values are replaced by the exact
/// value of the greedy strategy (a linear solve over the finite types) when
/// that has no larger fixed-point residual.
/// The returned strategy is the argmin at the final values, ties broken by
/// lowest action index.
[[nodiscard]] SolveResult value_iterate(const Bmdp& model, const SolveParams& params = {});

/// Square non-negative matrix over types; entry (q, r) is the expected number
/// of type-r children of a type-q entity under a fixed strategy.
class ExpectedOffspringMatrix {
public:
    explicit ExpectedOffspringMatrix(std::size_t n = 0) : n_(n), data_(n * n, 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double& operator()(std::size_t row, std::size_t col) { return data_[row * n_ + col]; }
    [[nodiscard]] double operator()(std::size_t row, std::size_t col) const { return data_[row * n_ + col]; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const { return {data_.data() + r * n_, n_}; }

private:
    std::size_t n_;
    std::vector<double> data_;
};

[[nodiscard]] ExpectedOffspringMatrix expected_offspring(const Bmdp& model, const StaticStrategy& sigma);

/// Per-type one-step cost under sigma.
[[nodiscard]] ValueVector strategy_costs(const Bmdp& model, const StaticStrategy& sigma);

/// Perron root estimate by power iteration on B + I.
[[nodiscard]] double spectral_radius(const ExpectedOffspringMatrix& b, std::size_t rounds = 200,
                                     double tolerance = 1e-12);

/// Solves (I - B) x = c by Gaussian elimination with partial pivoting.
/// Returns nullopt for a (numerically) singular system.
[[nodiscard]] std::optional<ValueVector> solve_identity_minus(const ExpectedOffspringMatrix& b,
                                                              std::span<const double> c);

enum class EvaluationMethod { LinearSolve, Iteration };

struct StrategyEvaluation {
    ValueVector values;
    double spectral_radius = 0.0;
    EvaluationMethod method = EvaluationMethod::LinearSolve;
    /// Set when the linear solve was attempted but rejected.
    std::optional<std::string> note;
};

/// Spectral radius below this counts as subcritical.
inline constexpr double kCriticalRadius = 1.0 - 1e-9;

/// Expected total cost per type when every entity follows sigma.
///
/// With spectral radius below kCriticalRadius the linear system
/// (I - B_sigma) x = c_sigma is solved directly; otherwise, or when the solve
/// is singular or yields a negative or non-finite entry, Kleene iteration on
/// the restricted chain is used instead.
[[nodiscard]] StrategyEvaluation evaluate_static_strategy(const Bmdp& model, const StaticStrategy& sigma,
                                                          const SolveParams& params = {});

/// Same quantity, always by iteration. Used to cross-check the linear path.
[[nodiscard]] ValueVector iterate_static_strategy(const Bmdp& model, const StaticStrategy& sigma,
                                                  const SolveParams& params = {});

/// Total value of a configuration: the sum over its entities.
[[nodiscard]] double config_value(std::span<const double> values, const Config& alpha);

/// Types ordered so that every type comes after all types it can spawn.
/// Returns nullopt if the offspring graph has a cycle (self-loops included).
[[nodiscard]] std::optional<std::vector<TypeId>> children_first_order(const Bmdp& model);

/// Exact values for hierarchical models in one backward pass; nullopt when
/// the offspring graph is cyclic.
[[nodiscard]] std::optional<ValueVector> solve_acyclic(const Bmdp& model);

}  // namespace bmdp
