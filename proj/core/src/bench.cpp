#include "bmdp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "bmdp/random.hpp"

namespace bmdp {

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) noexcept {
    Rng stream = Rng(master).split(trial);
    return stream.next_u64();
}

TrialSet run_trials(const Bmdp& model, const LearnParams& params, std::size_t trials, unsigned threads) {
    params.check();
    TrialSet set;
    set.seeds.resize(trials);
    set.results.resize(trials);
    set.seconds.resize(trials);
    for (std::size_t i = 0; i < trials; ++i) set.seeds[i] = trial_seed(params.seed, i);

    auto run_one = [&](std::size_t i) {
        LearnParams p = params;
        p.seed = set.seeds[i];
        const auto start = std::chrono::steady_clock::now();
        set.results[i] = run_learning(model, p);
        set.seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < trials; ++i) run_one(i);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < trials; i += threads) run_one(i);
            });
    }

    if (trials == 0) return set;
    set.mean_q = QTable(model, 0.0);
    for (const LearnResult& r : set.results) {
        set.mean_estimate += r.estimate;
        auto dst = set.mean_q.values();
        const auto src = r.q.values();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
    for (double s : set.seconds) set.mean_seconds += s;
    const double n = static_cast<double>(trials);
    set.mean_estimate /= n;
    set.mean_seconds /= n;
    for (double& v : set.mean_q.values()) v /= n;
    set.strategy = extract_greedy_strategy(set.mean_q, params.tol);
    return set;
}

BenchRow bench_model(const std::string& name, const Bmdp& model, const LearnParams& params, std::size_t trials,
                     const SolveParams& solve, unsigned threads) {
    BenchRow row;
    row.name = name;
    row.types = model.type_count();
    row.ep_l = params.ep_l;
    row.ep_n = params.ep_n;
    row.estimated_cost = std::numeric_limits<double>::quiet_NaN();

    const SolveResult exact = value_iterate(model, solve);
    row.exact_values = exact.values;
    row.exact_strategy = exact.strategy;
    row.optimal_cost = config_value(exact.values, model.init);
    // Exploration reaches every type's actions, so one infinite type is
    // enough for the learned table to blow up.
    if (std::any_of(exact.values.begin(), exact.values.end(), [](double v) { return std::isinf(v); })) {
        row.status = "inf/diverged";
        return row;
    }
    if (exact.status != SolveStatus::Converged) row.status = "not converged";

    const TrialSet set = run_trials(model, params, trials, threads);
    row.estimated_cost = set.mean_estimate;
    row.time_seconds = set.mean_seconds;
    row.learned_strategy = set.strategy;
    for (const auto& r : set.results) row.trial_estimates.push_back(r.estimate);
    return row;
}

std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_bench_table(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << std::left << std::setw(16) << "Name" << std::right << std::setw(7) << "types" << std::setw(14)
        << "optimal cost" << std::setw(16) << "estimated cost" << std::setw(13) << "time (avg.)" << std::setw(7)
        << "ep-l" << std::setw(8) << "ep-n"
        << "  status\n";
    for (const BenchRow& r : rows) {
        std::ostringstream time;
        time << std::fixed << std::setprecision(3) << r.time_seconds;
        out << std::left << std::setw(16) << r.name << std::right << std::setw(7) << r.types << std::setw(14)
            << format_value(r.optimal_cost) << std::setw(16)
            << (std::isnan(r.estimated_cost) ? std::string("-") : format_value(r.estimated_cost)) << std::setw(13)
            << time.str() << std::setw(7) << r.ep_l << std::setw(8) << r.ep_n << "  " << r.status << '\n';
    }
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "name,types,optimal_cost,estimated_cost,time_seconds,ep_l,ep_n,status\n";
    for (const BenchRow& r : rows)
        out << r.name << ',' << r.types << ',' << format_value(r.optimal_cost) << ','
            << format_value(r.estimated_cost) << ',' << format_value(r.time_seconds) << ',' << r.ep_l << ','
            << r.ep_n << ',' << r.status << '\n';
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
    out << "episode,estimate\n";
    for (const CurvePoint& p : curve) out << p.episode << ',' << format_value(p.estimate) << '\n';
}

}  // namespace bmdp
