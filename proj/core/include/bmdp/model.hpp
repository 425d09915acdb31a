#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bmdp {

/// Dense index of a type, assigned in declaration order.
struct TypeId {
    std::size_t index = 0;
    auto operator<=>(const TypeId&) const = default;
};

/// Index of an action, local to the type that declares it.
struct ActionId {
    std::size_t index = 0;
    auto operator<=>(const ActionId&) const = default;
};

/// Ordered list of live entities. The empty configuration is absorbing.
class Config {
public:
    Config() = default;
    Config(std::initializer_list<TypeId> entities) : entities_(entities) {}
    explicit Config(std::vector<TypeId> entities) : entities_(std::move(entities)) {}

    [[nodiscard]] bool empty() const noexcept { return entities_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return entities_.size(); }
    [[nodiscard]] TypeId operator[](std::size_t i) const { return entities_[i]; }
    [[nodiscard]] auto begin() const noexcept { return entities_.begin(); }
    [[nodiscard]] auto end() const noexcept { return entities_.end(); }
    [[nodiscard]] const std::vector<TypeId>& entities() const noexcept { return entities_; }

    bool operator==(const Config&) const = default;

private:
    std::vector<TypeId> entities_;
};

/// a followed by b.
[[nodiscard]] Config config_concat(const Config& a, const Config& b);

struct OffspringOutcome {
    double probability = 0.0;
    Config offspring;

    bool operator==(const OffspringOutcome&) const = default;
};

struct ActionSpec {
    std::string name;
    double cost = 0.0;
    std::vector<OffspringOutcome> outcomes;

    bool operator==(const ActionSpec&) const = default;
};

struct TypeSpec {
    std::string name;
    std::vector<ActionSpec> actions;

    bool operator==(const TypeSpec&) const = default;
};

/// Tolerance on the sum of an action's outcome probabilities.
inline constexpr double kProbabilityTolerance = 1e-9;

/// A branching MDP: types, their actions with costs and offspring
/// distributions, and an initial configuration.
///
/// Plain aggregate; build it field by field and check it with validate().
/// All algorithms in this library assume a model with no violations.
struct Bmdp {
    std::string name;
    std::vector<TypeSpec> types;
    Config init;

    bool operator==(const Bmdp&) const = default;

    [[nodiscard]] std::size_t type_count() const noexcept { return types.size(); }
    [[nodiscard]] const TypeSpec& type(TypeId q) const { return types.at(q.index); }
    [[nodiscard]] const ActionSpec& action(TypeId q, ActionId a) const {
        return types.at(q.index).actions.at(a.index);
    }
    [[nodiscard]] std::size_t action_count(TypeId q) const { return type(q).actions.size(); }
    /// Number of (type, action) pairs.
    [[nodiscard]] std::size_t pair_count() const noexcept;
    /// True iff every type has exactly one action (a branching Markov chain).
    [[nodiscard]] bool is_chain() const noexcept;

    [[nodiscard]] std::optional<TypeId> find_type(std::string_view name) const;
    [[nodiscard]] std::optional<ActionId> find_action(TypeId q, std::string_view name) const;
};

/// Location and description of one structural problem in a model.
struct Violation {
    std::optional<std::size_t> type;
    std::optional<std::size_t> action;
    std::optional<std::size_t> outcome;
    std::string message;
};

/// Every violated structural invariant of the model; empty iff well formed.
[[nodiscard]] std::vector<Violation> validate(const Bmdp& model);

[[nodiscard]] std::string describe(const Violation& v, const Bmdp& model);

/// Makes each action's probabilities sum to one when they are already within
/// kProbabilityTolerance. The last outcome absorbs the residual, so applying
/// this twice is the same as applying it once.
void normalize_probabilities(Bmdp& model);

/// Per-type extended non-negative reals; +inf marks an infinite value.
using ValueVector = std::vector<double>;

/// True iff no entry is NaN or negative.
[[nodiscard]] bool is_valid_values(std::span<const double> values) noexcept;

/// One action per type.
using StaticStrategy = std::vector<ActionId>;

[[nodiscard]] bool is_valid_strategy(const Bmdp& model, const StaticStrategy& sigma);

/// The chain obtained by keeping only sigma's action for every type.
[[nodiscard]] Bmdp restrict_to_strategy(const Bmdp& model, const StaticStrategy& sigma);

/// Q-value per (type, action) pair, stored flat with per-type offsets.
class QTable {
public:
    QTable() = default;
    explicit QTable(const Bmdp& model, double fill = 0.0);
    /// Shape taken from action counts per type.
    explicit QTable(std::span<const std::size_t> action_counts, double fill = 0.0);

    [[nodiscard]] double& operator()(TypeId q, ActionId a) { return values_[offsets_[q.index] + a.index]; }
    [[nodiscard]] double operator()(TypeId q, ActionId a) const {
        return values_[offsets_[q.index] + a.index];
    }

    [[nodiscard]] std::size_t type_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    [[nodiscard]] std::size_t action_count(TypeId q) const {
        return offsets_[q.index + 1] - offsets_[q.index];
    }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    /// Flat index of a pair and its inverse.
    [[nodiscard]] std::size_t flat_index(TypeId q, ActionId a) const { return offsets_[q.index] + a.index; }
    [[nodiscard]] std::pair<TypeId, ActionId> pair_at(std::size_t flat) const;

    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// min over actions of Q(q, .)
    [[nodiscard]] double min_value(TypeId q) const;
    /// Lowest-index action attaining min_value(q).
    [[nodiscard]] ActionId argmin(TypeId q) const;

    /// Per-type minima.
    [[nodiscard]] ValueVector greedy_values() const;

    bool operator==(const QTable&) const = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<double> values_;
};

/// Builds a table whose (q, a) entry is `per_type[q]` for every action.
[[nodiscard]] QTable broadcast(const Bmdp& model, const ValueVector& per_type);

}  // namespace bmdp
