#include "bmdp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace bmdp {

namespace {

void check_action(const Bmdp& model, TypeId q, ActionId a) {
    if (q.index >= model.type_count()) throw std::out_of_range("unknown type #" + std::to_string(q.index));
    if (a.index >= model.action_count(q))
        throw std::out_of_range("action #" + std::to_string(a.index) + " is not available to type " +
                                model.type(q).name);
}

// Running mean and sum of squared deviations; merged in a fixed order.
struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t truncated = 0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        const std::size_t total = n + o.n;
        const double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.n) / static_cast<double>(total);
        m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / static_cast<double>(total);
        n = total;
        truncated += o.truncated;
    }
};

constexpr std::size_t kChunk = 1024;

}  // namespace

const Config& sample_offspring(const Bmdp& model, TypeId q, ActionId a, Rng& rng) {
    check_action(model, q, a);
    const auto& outcomes = model.action(q, a).outcomes;
    const double u = rng.uniform01();
    double cumulative = 0.0;
    for (const auto& outcome : outcomes) {
        cumulative += outcome.probability;
        if (u < cumulative) return outcome.offspring;
    }
    return outcomes.back().offspring;
}

StepRecord step(const Bmdp& model, const Config& config, std::size_t entity_index, ActionId a, Rng& rng) {
    if (entity_index < 1 || entity_index > config.size())
        throw std::out_of_range("entity index " + std::to_string(entity_index) + " outside configuration of size " +
                                std::to_string(config.size()));
    const TypeId q = config[entity_index - 1];
    StepRecord rec;
    rec.entity_index = entity_index;
    rec.type = q;
    rec.action = a;
    rec.offspring = sample_offspring(model, q, a, rng);
    rec.cost = model.action(q, a).cost;

    const auto& e = config.entities();
    std::vector<TypeId> next;
    next.reserve(e.size() - 1 + rec.offspring.size());
    next.insert(next.end(), e.begin(), e.begin() + static_cast<std::ptrdiff_t>(entity_index - 1));
    next.insert(next.end(), rec.offspring.begin(), rec.offspring.end());
    next.insert(next.end(), e.begin() + static_cast<std::ptrdiff_t>(entity_index), e.end());
    rec.next_config = Config(std::move(next));
    return rec;
}

EpisodeResult run_episode(const Bmdp& model, const Config& start, const StaticStrategy& sigma,
                          std::size_t max_steps, Rng& rng, bool record_trace) {
    if (!is_valid_strategy(model, sigma)) throw std::invalid_argument("run_episode: invalid strategy");
    EpisodeResult result;
    if (record_trace) {
        Config config = start;
        while (!config.empty() && result.steps < max_steps) {
            StepRecord rec = step(model, config, 1, sigma[config[0].index], rng);
            result.total_cost += rec.cost;
            ++result.steps;
            config = rec.next_config;
            result.trace.push_back(std::move(rec));
        }
        result.terminated = config.empty();
        return result;
    }

    // Stack with the first entity on top.
    std::vector<TypeId> stack(start.entities().rbegin(), start.entities().rend());
    while (!stack.empty() && result.steps < max_steps) {
        const TypeId q = stack.back();
        stack.pop_back();
        const ActionId a = sigma[q.index];
        const Config& children = sample_offspring(model, q, a, rng);
        result.total_cost += model.action(q, a).cost;
        ++result.steps;
        stack.insert(stack.end(), children.entities().rbegin(), children.entities().rend());
    }
    result.terminated = stack.empty();
    return result;
}

MonteCarloEstimate monte_carlo_estimate(const Bmdp& model, const Config& start, const StaticStrategy& sigma,
                                        std::size_t episodes, std::size_t max_steps, const Rng& rng,
                                        unsigned threads) {
    if (episodes == 0) throw std::invalid_argument("monte_carlo_estimate: episodes must be positive");
    if (!is_valid_strategy(model, sigma)) throw std::invalid_argument("monte_carlo_estimate: invalid strategy");

    const std::size_t chunks = (episodes + kChunk - 1) / kChunk;
    std::vector<Moments> partial(chunks);
    auto run_chunk = [&](std::size_t c) {
        Moments m;
        const std::size_t last = std::min(episodes, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < last; ++i) {
            Rng stream = rng.split(i);
            const EpisodeResult r = run_episode(model, start, sigma, max_steps, stream);
            m.add(r.total_cost);
            if (!r.terminated) ++m.truncated;
        }
        partial[c] = m;
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (threads == 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t c = t; c < chunks; c += threads) run_chunk(c);
            });
    }

    Moments total;
    for (const Moments& m : partial) total.merge(m);
    MonteCarloEstimate est;
    est.episodes = total.n;
    est.mean = total.mean;
    const double variance = total.n > 1 ? total.m2 / static_cast<double>(total.n - 1) : 0.0;
    est.stderr_of_mean = std::sqrt(std::max(0.0, variance) / static_cast<double>(total.n));
    est.truncated_fraction = static_cast<double>(total.truncated) / static_cast<double>(total.n);
    return est;
}

void write_trace(std::ostream& out, const Bmdp& model, const std::vector<StepRecord>& trace) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const StepRecord& r = trace[i];
        out << i + 1 << '\t' << r.entity_index << '\t' << model.type(r.type).name << '\t'
            << model.action(r.type, r.action).name << '\t' << r.cost << '\t' << r.next_config.size() << '\n';
    }
}

}  // namespace bmdp
