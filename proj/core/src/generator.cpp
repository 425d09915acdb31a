#include "bmdp/generator.hpp"

#include <stdexcept>
#include <string>

#include "bmdp/random.hpp"

namespace bmdp {

void GenParams::check() const {
    if (n_types == 0) throw std::invalid_argument("n_types must be at least 1");
    if (max_actions == 0) throw std::invalid_argument("max_actions must be at least 1");
    if (max_outcomes == 0) throw std::invalid_argument("max_outcomes must be at least 1");
    if (!(cost_low > 0.0)) throw std::invalid_argument("cost_low must be positive");
    if (!(cost_high >= cost_low)) throw std::invalid_argument("cost_high must be at least cost_low");
}

namespace {

double expected_children(const std::vector<OffspringOutcome>& outcomes) {
    double s = 0.0;
    for (const auto& o : outcomes) s += o.probability * static_cast<double>(o.offspring.size());
    return s;
}

void drop_until_subcritical(std::vector<OffspringOutcome>& outcomes) {
    while (expected_children(outcomes) > kSubcriticalRowSum) {
        std::size_t heaviest = 0;
        double weight = -1.0;
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            const double w = outcomes[i].probability * static_cast<double>(outcomes[i].offspring.size());
            if (w > weight) {
                weight = w;
                heaviest = i;
            }
        }
        std::vector<TypeId> shorter = outcomes[heaviest].offspring.entities();
        shorter.pop_back();
        outcomes[heaviest].offspring = Config(std::move(shorter));
    }
}

std::vector<OffspringOutcome> merge_duplicates(std::vector<OffspringOutcome> outcomes) {
    std::vector<OffspringOutcome> merged;
    for (auto& o : outcomes) {
        bool found = false;
        for (auto& m : merged)
            if (m.offspring == o.offspring) {
                m.probability += o.probability;
                found = true;
                break;
            }
        if (!found) merged.push_back(std::move(o));
    }
    return merged;
}

}  // namespace

Bmdp gen_random_bmdp(const GenParams& params) {
    params.check();
    Rng rng(params.seed);
    const std::size_t n = params.n_types;

    Bmdp model;
    model.name = "rand_seed" + std::to_string(params.seed);
    model.types.resize(n);
    for (std::size_t q = 0; q < n; ++q) model.types[q].name = "t" + std::to_string(q);

    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t first_child = params.hierarchical ? q + 1 : 0;
        const std::size_t n_actions = 1 + rng.uniform_index(params.max_actions);
        for (std::size_t a = 0; a < n_actions; ++a) {
            ActionSpec action;
            action.name = "a" + std::to_string(a + 1);
            action.cost = params.cost_low + (params.cost_high - params.cost_low) * rng.uniform01();

            const std::size_t n_outcomes = 1 + rng.uniform_index(params.max_outcomes);
            std::vector<OffspringOutcome> outcomes(n_outcomes);
            double total = 0.0;
            for (auto& o : outcomes) {
                o.probability = 1.0 - rng.uniform01();  // in (0, 1]
                total += o.probability;
                std::size_t len = rng.uniform_index(params.max_offspring_len + 1);
                if (first_child >= n) len = 0;
                std::vector<TypeId> children(len);
                for (auto& c : children) c = TypeId{first_child + rng.uniform_index(n - first_child)};
                o.offspring = Config(std::move(children));
            }
            for (auto& o : outcomes) o.probability /= total;
            if (params.subcritical) drop_until_subcritical(outcomes);
            action.outcomes = merge_duplicates(std::move(outcomes));
            model.types[q].actions.push_back(std::move(action));
        }
    }
    model.init = Config{TypeId{0}};
    normalize_probabilities(model);
    return model;
}

}  // namespace bmdp
