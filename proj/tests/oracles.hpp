#pragma once

// Test-only reference computations. These work straight from the model's
// outcome lists and do not call into the solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "bmdp/model.hpp"

namespace bmdp::oracle {

/// Value of sigma by summing the Neumann series x = c + B x iteratively,
/// starting from zero, until the step is below 1e-13 relative. Components
/// that exceed 1e9 are reported as +inf.
inline ValueVector neumann_value(const Bmdp& model, const StaticStrategy& sigma, std::size_t max_rounds = 2'000'000) {
    const std::size_t n = model.types.size();
    std::vector<double> x(n, 0.0), next(n, 0.0);
    for (std::size_t round = 0; round < max_rounds; ++round) {
        double change = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            const ActionSpec& act = model.types[q].actions[sigma[q].index];
            long double v = act.cost;
            for (const auto& o : act.outcomes)
                for (TypeId c : o.offspring) v += static_cast<long double>(o.probability) * x[c.index];
            next[q] = static_cast<double>(v);
            change = std::max(change, std::abs(next[q] - x[q]) / std::max(1.0, next[q]));
        }
        x.swap(next);
        if (change < 1e-13) break;
        if (std::any_of(x.begin(), x.end(), [](double v) { return v > 1e10; })) break;
    }
    for (double& v : x)
        if (v > 1e9) v = std::numeric_limits<double>::infinity();
    return x;
}

/// Every static strategy of the model, in lexicographic order.
inline std::vector<StaticStrategy> all_strategies(const Bmdp& model) {
    std::vector<StaticStrategy> out;
    StaticStrategy cur(model.types.size());
    while (true) {
        out.push_back(cur);
        std::size_t q = 0;
        for (; q < cur.size(); ++q) {
            if (cur[q].index + 1 < model.types[q].actions.size()) {
                ++cur[q].index;
                break;
            }
            cur[q].index = 0;
        }
        if (q == cur.size()) break;
    }
    return out;
}

/// Componentwise minimum over all static strategies (an optimal static
/// strategy exists, so this is the optimal value vector).
inline ValueVector brute_force_optimum(const Bmdp& model) {
    ValueVector best(model.types.size(), std::numeric_limits<double>::infinity());
    for (const auto& sigma : all_strategies(model)) {
        const ValueVector v = neumann_value(model, sigma);
        for (std::size_t q = 0; q < best.size(); ++q) best[q] = std::min(best[q], v[q]);
    }
    return best;
}

/// Backward substitution for chains whose type i only spawns types > i.
inline ValueVector backward_substitution(const Bmdp& model) {
    const std::size_t n = model.types.size();
    ValueVector x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& act : model.types[i].actions) {
            double v = act.cost;
            for (const auto& o : act.outcomes) {
                double s = 0.0;
                for (TypeId c : o.offspring) s += x[c.index];
                v += o.probability * s;
            }
            best = std::min(best, v);
        }
        x[i] = best;
    }
    return x;
}

}  // namespace bmdp::oracle
