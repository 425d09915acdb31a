#include "bmdp/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bmdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack on the growth certificate and the noise floor below which an
// increment is treated as zero.
constexpr double kGrowthSlack = 1e-9;
constexpr double kIncrementFloor = 1e-6;

bool touches_infinite(const ActionSpec& action, std::span<const double> x) {
    for (const auto& outcome : action.outcomes)
        for (TypeId child : outcome.offspring)
            if (std::isinf(x[child.index])) return true;
    return false;
}

// Types in the returned mask grow without bound under Kleene iteration,
// given increment `d` between two successive finite iterates.
std::vector<bool> certify_growth(const Bmdp& model, std::span<const double> x, std::vector<double> d) {
    const std::size_t n = model.type_count();
    std::vector<bool> in_set(n, false);
    for (std::size_t q = 0; q < n; ++q) {
        if (std::isfinite(x[q]) && d[q] > kIncrementFloor * std::max(1.0, x[q]))
            in_set[q] = true;
        else
            d[q] = 0.0;
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t q = 0; q < n; ++q) {
            if (!in_set[q]) continue;
            double best = kInf;
            for (const ActionSpec& action : model.types[q].actions) {
                if (touches_infinite(action, x)) continue;
                double growth = 0.0;
                for (const auto& outcome : action.outcomes) {
                    double sum = 0.0;
                    for (TypeId child : outcome.offspring) sum += d[child.index];
                    growth += outcome.probability * sum;
                }
                best = std::min(best, growth);
            }
            if (best < (1.0 - kGrowthSlack) * d[q]) {
                in_set[q] = false;
                d[q] = 0.0;
                changed = true;
            }
        }
    }
    return in_set;
}

bool should_check_growth(std::size_t iteration) { return iteration < 8 || iteration % 32 == 0; }

double residual(const Bmdp& model, std::span<const double> x) {
    const ValueVector fx = apply_target(model, x);
    double r = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q)
        if (std::isfinite(x[q])) r = std::max(r, std::abs(fx[q] - x[q]));
    return r;
}

// Exact value of the greedy strategy at x on the finite types of x, or
// nullopt if the solve fails.
std::optional<ValueVector> evaluate_greedy_on_finite(const Bmdp& model, std::span<const double> x) {
    const StaticStrategy sigma = greedy_strategy(model, x);
    std::vector<std::size_t> finite, slot(x.size(), 0);
    for (std::size_t q = 0; q < x.size(); ++q)
        if (std::isfinite(x[q])) {
            slot[q] = finite.size();
            finite.push_back(q);
        }
    ExpectedOffspringMatrix b(finite.size());
    ValueVector c(finite.size());
    for (std::size_t i = 0; i < finite.size(); ++i) {
        const ActionSpec& action = model.types[finite[i]].actions[sigma[finite[i]].index];
        c[i] = action.cost;
        for (const auto& outcome : action.outcomes)
            for (TypeId child : outcome.offspring) {
                if (!std::isfinite(x[child.index])) return std::nullopt;
                b(i, slot[child.index]) += outcome.probability;
            }
    }
    auto solved = solve_identity_minus(b, c);
    if (!solved) return std::nullopt;
    ValueVector out(x.begin(), x.end());
    for (std::size_t i = 0; i < finite.size(); ++i) {
        const double v = (*solved)[i];
        if (!std::isfinite(v) || v < 0.0) return std::nullopt;
        out[finite[i]] = v;
    }
    return out;
}

}  // namespace

void SolveParams::check() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
    if (!(divergence_threshold > tolerance))
        throw std::invalid_argument("divergence threshold must exceed the tolerance");
}

double action_value(const Bmdp& model, TypeId q, ActionId a, std::span<const double> x) {
    const ActionSpec& action = model.action(q, a);
    double total = action.cost;
    for (const auto& outcome : action.outcomes) {
        double sum = 0.0;
        for (TypeId child : outcome.offspring) sum += x[child.index];
        total += outcome.probability * sum;
    }
    assert(!std::isnan(total));
    return total;
}

ValueVector apply_target(const Bmdp& model, std::span<const double> x) {
    const std::size_t n = model.type_count();
    ValueVector out(n, kInf);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t a = 0; a < model.types[q].actions.size(); ++a)
            out[q] = std::min(out[q], action_value(model, TypeId{q}, ActionId{a}, x));
    return out;
}

StaticStrategy greedy_strategy(const Bmdp& model, std::span<const double> x) {
    StaticStrategy sigma(model.type_count());
    for (std::size_t q = 0; q < sigma.size(); ++q) {
        double best = kInf;
        for (std::size_t a = 0; a < model.types[q].actions.size(); ++a) {
            const double v = action_value(model, TypeId{q}, ActionId{a}, x);
            if (v < best) {
                best = v;
                sigma[q] = ActionId{a};
            }
        }
    }
    return sigma;
}

SolveResult value_iterate(const Bmdp& model, const SolveParams& params) {
    params.check();
    const std::size_t n = model.type_count();
    ValueVector x(n, 0.0);
    SolveResult result;
    result.status = SolveStatus::NotConverged;

    for (std::size_t k = 0; k < params.max_iterations; ++k) {
        ValueVector next = apply_target(model, x);
        double change = 0.0;
        std::vector<double> increment(n, 0.0);
        for (std::size_t q = 0; q < n; ++q) {
            if (std::isinf(x[q])) next[q] = kInf;  // pinned
            if (next[q] > params.divergence_threshold) next[q] = kInf;
            if (std::isfinite(next[q])) {
                increment[q] = next[q] - x[q];
                change = std::max(change, std::abs(increment[q]));
            }
        }
        result.iterations = k + 1;

        if (change < params.tolerance) {
            x = std::move(next);
            result.status = SolveStatus::Converged;
            break;
        }
        if (should_check_growth(k)) {
            const std::vector<bool> growing = certify_growth(model, next, increment);
            for (std::size_t q = 0; q < n; ++q)
                if (growing[q]) next[q] = kInf;
        }
        x = std::move(next);
    }

    if (params.polish && result.status == SolveStatus::Converged) {
        if (auto exact = evaluate_greedy_on_finite(model, x); exact && residual(model, *exact) <= residual(model, x))
            x = std::move(*exact);
    }

    const ValueVector check = apply_target(model, x);
    result.converged_types.assign(n, false);
    for (std::size_t q = 0; q < n; ++q)
        result.converged_types[q] = std::isfinite(x[q]) &&
                                    (result.status == SolveStatus::Converged ||
                                     std::abs(check[q] - x[q]) < params.tolerance);
    result.strategy = greedy_strategy(model, x);
    result.values = std::move(x);
    return result;
}

ExpectedOffspringMatrix expected_offspring(const Bmdp& model, const StaticStrategy& sigma) {
    if (!is_valid_strategy(model, sigma)) throw std::invalid_argument("expected_offspring: invalid strategy");
    const std::size_t n = model.type_count();
    ExpectedOffspringMatrix b(n);
    for (std::size_t q = 0; q < n; ++q)
        for (const auto& outcome : model.types[q].actions[sigma[q].index].outcomes)
            for (TypeId child : outcome.offspring) b(q, child.index) += outcome.probability;
    return b;
}

ValueVector strategy_costs(const Bmdp& model, const StaticStrategy& sigma) {
    if (!is_valid_strategy(model, sigma)) throw std::invalid_argument("strategy_costs: invalid strategy");
    ValueVector c(model.type_count());
    for (std::size_t q = 0; q < c.size(); ++q) c[q] = model.types[q].actions[sigma[q].index].cost;
    return c;
}

double spectral_radius(const ExpectedOffspringMatrix& b, std::size_t rounds, double tolerance) {
    const std::size_t n = b.size();
    if (n == 0) return 0.0;
    std::vector<double> x(n, 1.0), y(n);
    double lambda = 0.0;
    for (std::size_t round = 0; round < rounds; ++round) {
        for (std::size_t r = 0; r < n; ++r) {
            double s = x[r];  // the shift by I keeps the iteration aperiodic
            const auto row = b.row(r);
            for (std::size_t c = 0; c < n; ++c) s += row[c] * x[c];
            y[r] = s;
        }
        const double next = *std::max_element(y.begin(), y.end());
        for (std::size_t r = 0; r < n; ++r) x[r] = y[r] / next;
        const bool settled = std::abs(next - lambda) < tolerance;
        lambda = next;
        if (settled) break;
    }
    return std::max(0.0, lambda - 1.0);
}

std::optional<ValueVector> solve_identity_minus(const ExpectedOffspringMatrix& b, std::span<const double> c) {
    const std::size_t n = b.size();
    std::vector<double> a(n * (n + 1));
    auto at = [&a, n](std::size_t r, std::size_t col) -> double& { return a[r * (n + 1) + col]; };
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t col = 0; col < n; ++col) at(r, col) = (r == col ? 1.0 : 0.0) - b(r, col);
        at(r, n) = c[r];
    }

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
        if (std::abs(at(pivot, col)) < 1e-13) return std::nullopt;
        if (pivot != col)
            for (std::size_t k = col; k <= n; ++k) std::swap(at(pivot, k), at(col, k));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = at(r, col) / at(col, col);
            if (factor == 0.0) continue;
            for (std::size_t k = col; k <= n; ++k) at(r, k) -= factor * at(col, k);
        }
    }

    ValueVector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = at(i, n);
        for (std::size_t k = i + 1; k < n; ++k) s -= at(i, k) * x[k];
        x[i] = s / at(i, i);
    }
    return x;
}

ValueVector iterate_static_strategy(const Bmdp& model, const StaticStrategy& sigma, const SolveParams& params) {
    SolveParams plain = params;
    plain.polish = false;
    return value_iterate(restrict_to_strategy(model, sigma), plain).values;
}

StrategyEvaluation evaluate_static_strategy(const Bmdp& model, const StaticStrategy& sigma,
                                            const SolveParams& params) {
    params.check();
    const ExpectedOffspringMatrix b = expected_offspring(model, sigma);
    StrategyEvaluation eval;
    eval.spectral_radius = spectral_radius(b);

    if (eval.spectral_radius < kCriticalRadius) {
        const ValueVector c = strategy_costs(model, sigma);
        if (auto x = solve_identity_minus(b, c)) {
            const bool sane = std::all_of(x->begin(), x->end(), [](double v) { return std::isfinite(v) && v >= 0.0; });
            if (sane) {
                eval.values = std::move(*x);
                eval.method = EvaluationMethod::LinearSolve;
                return eval;
            }
            eval.note = "linear solve produced a negative or non-finite entry";
        } else {
            eval.note = "linear system is singular";
        }
    }

    eval.values = iterate_static_strategy(model, sigma, params);
    eval.method = EvaluationMethod::Iteration;
    return eval;
}

double config_value(std::span<const double> values, const Config& alpha) {
    double total = 0.0;
    for (TypeId t : alpha) total += values[t.index];
    return total;
}

std::optional<std::vector<TypeId>> children_first_order(const Bmdp& model) {
    const std::size_t n = model.type_count();
    // Edge q -> r when r appears in some offspring list of q. Kahn's algorithm
    // on the reversed graph emits children before parents.
    std::vector<std::vector<std::size_t>> parents(n);
    std::vector<std::size_t> out_degree(n, 0);
    for (std::size_t q = 0; q < n; ++q) {
        std::vector<bool> seen(n, false);
        for (const auto& action : model.types[q].actions)
            for (const auto& outcome : action.outcomes)
                for (TypeId child : outcome.offspring)
                    if (!seen[child.index]) {
                        seen[child.index] = true;
                        parents[child.index].push_back(q);
                        ++out_degree[q];
                    }
    }

    std::vector<TypeId> order;
    order.reserve(n);
    std::vector<std::size_t> ready;
    for (std::size_t q = 0; q < n; ++q)
        if (out_degree[q] == 0) ready.push_back(q);
    while (!ready.empty()) {
        const std::size_t r = ready.back();
        ready.pop_back();
        order.push_back(TypeId{r});
        for (std::size_t p : parents[r])
            if (--out_degree[p] == 0) ready.push_back(p);
    }
    if (order.size() != n) return std::nullopt;
    return order;
}

std::optional<ValueVector> solve_acyclic(const Bmdp& model) {
    const auto order = children_first_order(model);
    if (!order) return std::nullopt;
    ValueVector x(model.type_count(), 0.0);
    for (TypeId q : *order) {
        double best = kInf;
        for (std::size_t a = 0; a < model.action_count(q); ++a)
            best = std::min(best, action_value(model, q, ActionId{a}, x));
        x[q.index] = best;
    }
    return x;
}

}  // namespace bmdp
