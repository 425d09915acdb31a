#include "bmdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bmdp {

Config config_concat(const Config& a, const Config& b) {
    std::vector<TypeId> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return Config(std::move(out));
}

std::size_t Bmdp::pair_count() const noexcept {
    std::size_t n = 0;
    for (const auto& t : types) n += t.actions.size();
    return n;
}

bool Bmdp::is_chain() const noexcept {
    return std::all_of(types.begin(), types.end(), [](const TypeSpec& t) { return t.actions.size() == 1; });
}

std::optional<TypeId> Bmdp::find_type(std::string_view n) const {
    for (std::size_t i = 0; i < types.size(); ++i)
        if (types[i].name == n) return TypeId{i};
    return std::nullopt;
}

std::optional<ActionId> Bmdp::find_action(TypeId q, std::string_view n) const {
    const auto& actions = type(q).actions;
    for (std::size_t i = 0; i < actions.size(); ++i)
        if (actions[i].name == n) return ActionId{i};
    return std::nullopt;
}

namespace {

std::string format_sum(double s) {
    std::ostringstream os;
    os.precision(12);
    os << s;
    return os.str();
}

}  // namespace

std::vector<Violation> validate(const Bmdp& model) {
    std::vector<Violation> out;
    const std::size_t n = model.types.size();
    auto declared = [n](TypeId t) { return t.index < n; };

    if (n == 0) out.push_back({std::nullopt, std::nullopt, std::nullopt, "model declares no types"});

    std::set<std::string_view> type_names;
    for (std::size_t q = 0; q < n; ++q) {
        const TypeSpec& type = model.types[q];
        if (type.name.empty())
            out.push_back({q, std::nullopt, std::nullopt, "type name must be non-empty"});
        else if (!type_names.insert(type.name).second)
            out.push_back({q, std::nullopt, std::nullopt, "duplicate type name '" + type.name + "'"});

        if (type.actions.empty()) out.push_back({q, std::nullopt, std::nullopt, "type has no actions"});

        std::set<std::string_view> action_names;
        for (std::size_t a = 0; a < type.actions.size(); ++a) {
            const ActionSpec& action = type.actions[a];
            if (action.name.empty())
                out.push_back({q, a, std::nullopt, "action name must be non-empty"});
            else if (!action_names.insert(action.name).second)
                out.push_back({q, a, std::nullopt, "duplicate action name '" + action.name + "'"});

            if (!(action.cost > 0.0) || !std::isfinite(action.cost))
                out.push_back({q, a, std::nullopt, "cost must be strictly positive"});

            if (action.outcomes.empty()) {
                out.push_back({q, a, std::nullopt, "action has no outcomes"});
                continue;
            }

            double sum = 0.0;
            bool probabilities_ok = true;
            for (std::size_t o = 0; o < action.outcomes.size(); ++o) {
                const OffspringOutcome& outcome = action.outcomes[o];
                if (!(outcome.probability > 0.0 && outcome.probability <= 1.0)) {
                    out.push_back({q, a, o, "probability must lie in (0, 1]"});
                    probabilities_ok = false;
                }
                sum += outcome.probability;
                for (TypeId child : outcome.offspring)
                    if (!declared(child))
                        out.push_back({q, a, o, "offspring refers to undeclared type #" + std::to_string(child.index)});
                for (std::size_t prev = 0; prev < o; ++prev)
                    if (action.outcomes[prev].offspring == outcome.offspring)
                        out.push_back({q, a, o, "duplicate offspring list (same as outcome " + std::to_string(prev) + ")"});
            }
            if (probabilities_ok && std::abs(sum - 1.0) > kProbabilityTolerance)
                out.push_back({q, a, std::nullopt, "probabilities sum to " + format_sum(sum)});
        }
    }

    for (TypeId t : model.init)
        if (!declared(t))
            out.push_back({std::nullopt, std::nullopt, std::nullopt,
                           "initial configuration refers to undeclared type #" + std::to_string(t.index)});
    return out;
}

std::string describe(const Violation& v, const Bmdp& model) {
    std::ostringstream os;
    if (v.type) {
        os << "type ";
        if (*v.type < model.types.size() && !model.types[*v.type].name.empty())
            os << model.types[*v.type].name;
        else
            os << '#' << *v.type;
        if (v.action) {
            os << ", action ";
            const auto& actions = model.types[*v.type].actions;
            if (*v.action < actions.size() && !actions[*v.action].name.empty())
                os << actions[*v.action].name;
            else
                os << '#' << *v.action;
        }
        if (v.outcome) os << ", outcome " << *v.outcome;
        os << ": ";
    }
    os << v.message;
    return os.str();
}

void normalize_probabilities(Bmdp& model) {
    for (auto& type : model.types) {
        for (auto& action : type.actions) {
            auto& outcomes = action.outcomes;
            if (outcomes.empty()) continue;
            double sum = 0.0;
            for (const auto& o : outcomes) sum += o.probability;
            if (sum == 1.0 || std::abs(sum - 1.0) > kProbabilityTolerance) continue;
            double head = 0.0;
            for (std::size_t i = 0; i + 1 < outcomes.size(); ++i) head += outcomes[i].probability;
            const double last = 1.0 - head;
            if (last > 0.0) outcomes.back().probability = last;
        }
    }
}

bool is_valid_values(std::span<const double> values) noexcept {
    return std::none_of(values.begin(), values.end(), [](double v) { return std::isnan(v) || v < 0.0; });
}

bool is_valid_strategy(const Bmdp& model, const StaticStrategy& sigma) {
    if (sigma.size() != model.type_count()) return false;
    for (std::size_t q = 0; q < sigma.size(); ++q)
        if (sigma[q].index >= model.types[q].actions.size()) return false;
    return true;
}

Bmdp restrict_to_strategy(const Bmdp& model, const StaticStrategy& sigma) {
    if (!is_valid_strategy(model, sigma)) throw std::invalid_argument("restrict_to_strategy: invalid strategy");
    Bmdp out;
    out.name = model.name;
    out.init = model.init;
    out.types.reserve(model.types.size());
    for (std::size_t q = 0; q < model.types.size(); ++q)
        out.types.push_back({model.types[q].name, {model.types[q].actions[sigma[q].index]}});
    return out;
}

namespace {

std::vector<std::size_t> action_counts_of(const Bmdp& model) {
    std::vector<std::size_t> counts;
    counts.reserve(model.types.size());
    for (const auto& t : model.types) counts.push_back(t.actions.size());
    return counts;
}

}  // namespace

QTable::QTable(const Bmdp& model, double fill) : QTable(action_counts_of(model), fill) {}

QTable::QTable(std::span<const std::size_t> action_counts, double fill) {
    offsets_.reserve(action_counts.size() + 1);
    offsets_.push_back(0);
    for (std::size_t c : action_counts) offsets_.push_back(offsets_.back() + c);
    values_.assign(offsets_.back(), fill);
}

std::pair<TypeId, ActionId> QTable::pair_at(std::size_t flat) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
    const auto q = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    return {TypeId{q}, ActionId{flat - offsets_[q]}};
}

double QTable::min_value(TypeId q) const {
    const auto first = values_.begin() + static_cast<std::ptrdiff_t>(offsets_[q.index]);
    const auto last = values_.begin() + static_cast<std::ptrdiff_t>(offsets_[q.index + 1]);
    return *std::min_element(first, last);
}

ActionId QTable::argmin(TypeId q) const {
    const auto first = values_.begin() + static_cast<std::ptrdiff_t>(offsets_[q.index]);
    const auto last = values_.begin() + static_cast<std::ptrdiff_t>(offsets_[q.index + 1]);
    // min_element returns the first minimum, i.e. the lowest action index.
    return ActionId{static_cast<std::size_t>(std::min_element(first, last) - first)};
}

ValueVector QTable::greedy_values() const {
    ValueVector out(type_count());
    for (std::size_t q = 0; q < out.size(); ++q) out[q] = min_value(TypeId{q});
    return out;
}

QTable broadcast(const Bmdp& model, const ValueVector& per_type) {
    QTable out(model);
    for (std::size_t q = 0; q < model.type_count(); ++q)
        for (std::size_t a = 0; a < model.types[q].actions.size(); ++a) out(TypeId{q}, ActionId{a}) = per_type.at(q);
    return out;
}

}  // namespace bmdp
