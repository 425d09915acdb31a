#include "bmdp/qlearner.hpp"

#include <stdexcept>

#include "bmdp/simulator.hpp"
#include "bmdp/solver.hpp"

namespace bmdp {

std::vector<std::size_t> Environment::action_counts() const {
    std::vector<std::size_t> counts(type_count());
    for (std::size_t q = 0; q < counts.size(); ++q) counts[q] = action_count(TypeId{q});
    return counts;
}

Environment::Transition ModelEnvironment::sample(TypeId q, ActionId a, Rng& rng) const {
    const Config& offspring = sample_offspring(model_, q, a, rng);
    return {model_.action(q, a).cost, offspring};
}

std::string_view to_string(Schedule s) noexcept {
    return s == Schedule::Constant ? "constant" : "harmonic";
}

void LearnParams::check() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (ep_l == 0) throw std::invalid_argument("ep_l must be at least 1");
    if (ep_n == 0) throw std::invalid_argument("ep_n must be at least 1");
    if (!(q_init >= 0.0)) throw std::invalid_argument("q_init must be non-negative");
}

double learning_rate(const LearnParams& params, std::size_t visits) noexcept {
    if (params.schedule == Schedule::Constant) return params.alpha;
    return params.alpha / (1.0 + 0.001 * static_cast<double>(visits));
}

void q_update(QTable& table, TypeId q, ActionId a, double cost, const Config& offspring, double lambda) {
    double target = cost;
    for (TypeId child : offspring) target += table.min_value(child);
    double& entry = table(q, a);
    entry = (1.0 - lambda) * entry + lambda * target;
}

QTable apply_q_target(const Bmdp& model, const QTable& table) {
    const ValueVector minima = table.greedy_values();
    QTable out(model);
    for (std::size_t q = 0; q < model.type_count(); ++q)
        for (std::size_t a = 0; a < model.types[q].actions.size(); ++a)
            out(TypeId{q}, ActionId{a}) = action_value(model, TypeId{q}, ActionId{a}, minima);
    return out;
}

StaticStrategy extract_greedy_strategy(const QTable& table, double tol) {
    StaticStrategy sigma(table.type_count());
    for (std::size_t q = 0; q < sigma.size(); ++q) {
        const TypeId t{q};
        const double best = table.min_value(t);
        for (std::size_t a = 0; a < table.action_count(t); ++a)
            if (table(t, ActionId{a}) <= best + tol) {
                sigma[q] = ActionId{a};
                break;
            }
    }
    return sigma;
}

namespace {

double greedy_estimate(const QTable& table, const Config& init) {
    double total = 0.0;
    for (TypeId t : init) total += table.min_value(t);
    return total;
}

}  // namespace

LearnResult run_learning(const Environment& env, const LearnParams& params) {
    params.check();
    const std::vector<std::size_t> counts = env.action_counts();
    LearnResult result;
    result.q = QTable(counts, params.q_init);
    std::vector<std::size_t> visits(result.q.size(), 0);
    Rng rng(params.seed);
    const std::size_t stride = std::max<std::size_t>(1, params.ep_n / 200);

    std::vector<TypeId> config;
    for (std::size_t episode = 0; episode < params.ep_n; ++episode) {
        config = env.initial().entities();
        for (std::size_t s = 0; s < params.ep_l && !config.empty(); ++s) {
            const std::size_t j = rng.uniform_index(config.size());
            const TypeId q = config[j];
            ActionId a;
            if (rng.bernoulli(params.epsilon))
                a = ActionId{rng.uniform_index(counts[q.index])};
            else
                a = result.q.argmin(q);

            const Environment::Transition tr = env.sample(q, a, rng);
            const std::size_t flat = result.q.flat_index(q, a);
            q_update(result.q, q, a, tr.cost, tr.offspring, learning_rate(params, visits[flat]));
            ++visits[flat];
            ++result.updates;

            const auto pos = config.begin() + static_cast<std::ptrdiff_t>(j);
            const auto after = config.erase(pos);
            config.insert(after, tr.offspring.begin(), tr.offspring.end());
        }
        if ((episode + 1) % stride == 0 || episode + 1 == params.ep_n)
            result.curve.push_back({episode + 1, greedy_estimate(result.q, env.initial())});
    }

    result.estimate = greedy_estimate(result.q, env.initial());
    result.strategy = extract_greedy_strategy(result.q, params.tol);
    return result;
}

LearnResult run_learning(const Bmdp& model, const LearnParams& params) {
    const ModelEnvironment env(model);
    return run_learning(env, params);
}

RandomUpdater::RandomUpdater(const Environment& env, const LearnParams& params)
    : env_(env), params_(params), rng_(params.seed), q_(env.action_counts(), params.q_init) {
    params_.check();
    visits_.assign(q_.size(), 0);
}

RandomUpdater::RandomUpdater(const Environment& env, const LearnParams& params, QTable initial)
    : RandomUpdater(env, params) {
    if (initial.size() != q_.size() || initial.type_count() != q_.type_count())
        throw std::invalid_argument("RandomUpdater: initial table does not match the environment");
    q_ = std::move(initial);
}

void RandomUpdater::step() {
    const std::size_t flat = rng_.uniform_index(q_.size());
    const auto [q, a] = q_.pair_at(flat);
    const Environment::Transition tr = env_.sample(q, a, rng_);
    q_update(q_, q, a, tr.cost, tr.offspring, learning_rate(params_, visits_[flat]));
    ++visits_[flat];
    ++updates_;
    last_pair_ = flat;
}

void RandomUpdater::run(std::size_t updates) {
    for (std::size_t i = 0; i < updates; ++i) step();
}

LearnResult run_random_update(const Environment& env, const LearnParams& params, std::size_t updates) {
    if (updates == 0) throw std::invalid_argument("run_random_update: updates must be at least 1");
    RandomUpdater learner(env, params);
    LearnResult result;
    const std::size_t stride = std::max<std::size_t>(1, updates / 200);
    for (std::size_t i = 0; i < updates; ++i) {
        learner.step();
        if ((i + 1) % stride == 0 || i + 1 == updates)
            result.curve.push_back({i + 1, greedy_estimate(learner.table(), env.initial())});
    }
    result.q = learner.table();
    result.updates = learner.updates();
    result.estimate = greedy_estimate(result.q, env.initial());
    result.strategy = extract_greedy_strategy(result.q, params.tol);
    return result;
}

LearnResult run_random_update(const Bmdp& model, const LearnParams& params, std::size_t updates) {
    const ModelEnvironment env(model);
    return run_random_update(env, params, updates);
}

std::vector<QTable> expected_update_trajectory(const Bmdp& model, const QTable& q0, std::span<const double> lambdas,
                                               double p) {
    if (!model.is_chain())
        throw std::invalid_argument("expected_update_trajectory: every type must have exactly one action");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("expected_update_trajectory: p must lie in (0, 1]");
    if (q0.size() != model.pair_count())
        throw std::invalid_argument("expected_update_trajectory: table does not match the model");

    std::vector<QTable> trajectory;
    trajectory.reserve(lambdas.size() + 1);
    trajectory.push_back(q0);
    for (double lambda : lambdas) {
        QTable next = trajectory.back();
        const QTable target = apply_q_target(model, next);
        auto values = next.values();
        const auto t = target.values();
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += lambda * p * (t[i] - values[i]);
        trajectory.push_back(std::move(next));
    }
    return trajectory;
}

}  // namespace bmdp
