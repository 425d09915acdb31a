// bmdp: solve, learn, simulate, generate and benchmark branching MDPs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bmdp/bench.hpp"
#include "bmdp/generator.hpp"
#include "bmdp/parser.hpp"
#include "bmdp/qlearner.hpp"
#include "bmdp/simulator.hpp"
#include "bmdp/solver.hpp"
#include "bmdp/suite.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bmdp;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotConverged = 2;

struct InputError {
    std::string message;
};

Bmdp load_model(const std::string& path) {
    ParseResult r = parse_model_file(path);
    if (auto* e = std::get_if<ParseError>(&r)) throw InputError{path + ":" + e->to_string()};
    return std::get<Bmdp>(std::move(r));
}

std::string model_label(const Bmdp& m, const std::string& path) {
    return m.name.empty() ? fs::path(path).stem().string() : m.name;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

/// The seed given on the command line, or a fresh one that is printed so the
/// run can be repeated.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t drawn = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cout << "seed " << drawn << " (drawn; pass --seed " << drawn << " to repeat)\n";
    return drawn;
}

json value_json(double v) {
    if (std::isinf(v)) return "inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

json values_json(const Bmdp& m, const ValueVector& v) {
    json out = json::object();
    for (std::size_t q = 0; q < m.type_count(); ++q) out[m.types[q].name] = value_json(v[q]);
    return out;
}

json strategy_json(const Bmdp& m, const StaticStrategy& s) {
    json out = json::object();
    for (std::size_t q = 0; q < m.type_count() && q < s.size(); ++q)
        out[m.types[q].name] = m.types[q].actions[s[q].index].name;
    return out;
}

std::string strategy_text(const Bmdp& m, const StaticStrategy& s) {
    std::string out;
    for (std::size_t q = 0; q < s.size(); ++q) {
        if (q) out += ", ";
        out += m.types[q].name + ":" + m.types[q].actions[s[q].index].name;
    }
    return out;
}

json report_json(const std::string& label, const Bmdp& m) {
    return json{{"model", label},
                {"types", m.type_count()},
                {"exact", nullptr},
                {"learned", nullptr},
                {"params", json::object()}};
}

json learn_params_json(const LearnParams& p, std::size_t trials) {
    return json{{"epsilon", p.epsilon},        {"alpha", p.alpha}, {"schedule", std::string(to_string(p.schedule))},
                {"tol", p.tol},                {"ep_l", p.ep_l},   {"ep_n", p.ep_n},
                {"seed", p.seed},              {"trials", trials}};
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InputError{"cannot write " + path};
    out << j.dump(2) << '\n';
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError{"cannot write " + path};
    return out;
}

/// curve.csv -> curve_trial2.csv for the second of several trials.
std::string trial_path(const std::string& path, std::size_t trial, std::size_t trials) {
    if (trials == 1) return path;
    const fs::path p(path);
    return (p.parent_path() / (p.stem().string() + "_trial" + std::to_string(trial + 1) + p.extension().string()))
        .string();
}

/// Parses `T=a1,S=a2`. Every type must be covered.
StaticStrategy parse_strategy_spec(const Bmdp& m, const std::string& spec) {
    std::vector<std::optional<ActionId>> chosen(m.type_count());
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InputError{"bad strategy entry '" + item + "' (expected type=action)"};
        const std::string type = item.substr(0, eq), action = item.substr(eq + 1);
        const auto q = m.find_type(type);
        if (!q) throw InputError{"unknown type '" + type + "' in strategy"};
        const auto a = m.find_action(*q, action);
        if (!a) throw InputError{"type " + type + " has no action '" + action + "'"};
        chosen[q->index] = *a;
    }
    StaticStrategy sigma;
    for (std::size_t q = 0; q < chosen.size(); ++q) {
        if (!chosen[q]) throw InputError{"missing strategy for type " + m.types[q].name};
        sigma.push_back(*chosen[q]);
    }
    return sigma;
}

void add_learn_options(CLI::App& cmd, LearnParams& p, std::optional<std::uint64_t>& seed, std::string& schedule) {
    cmd.add_option("--epsilon", p.epsilon, "Exploration rate")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--alpha", p.alpha, "Learning-rate parameter")->capture_default_str();
    cmd.add_option("--tol", p.tol, "Q-values closer than this count as equal")->capture_default_str();
    cmd.add_option("--ep-l", p.ep_l, "Maximum episode length")->capture_default_str();
    cmd.add_option("--ep-n", p.ep_n, "Number of episodes")->capture_default_str();
    cmd.add_option("--schedule", schedule, "Learning-rate schedule")
        ->capture_default_str()
        ->check(CLI::IsMember({"constant", "harmonic"}));
    cmd.add_option("--seed", seed, "Master seed (drawn from the system when omitted)");
}

Schedule schedule_from(const std::string& s) { return s == "harmonic" ? Schedule::Harmonic : Schedule::Constant; }

// ---------------------------------------------------------------------------

struct SolveArgs {
    std::string model;
    SolveParams params;
    std::string json_path;
};

int cmd_solve(const SolveArgs& a) {
    const Bmdp m = load_model(a.model);
    a.params.check();
    const SolveResult r = value_iterate(m, a.params);

    std::size_t width = 4;
    for (const auto& t : m.types) width = std::max(width, t.name.size());
    std::cout << std::left << std::setw(static_cast<int>(width)) << "type" << "  " << std::setw(14) << "value"
              << "action\n";
    for (std::size_t q = 0; q < m.type_count(); ++q)
        std::cout << std::setw(static_cast<int>(width)) << m.types[q].name << "  " << std::setw(14)
                  << format_value(r.values[q]) << m.types[q].actions[r.strategy[q].index].name << '\n';
    std::cout << "init value " << format_value(config_value(r.values, m.init)) << '\n';
    std::cout << "iterations " << r.iterations << '\n';
    const bool converged = r.status == SolveStatus::Converged;
    if (!converged) std::cout << "status: not converged after " << r.iterations << " iterations\n";

    if (!a.json_path.empty()) {
        json j = report_json(model_label(m, a.model), m);
        j["exact"] = {{"values", values_json(m, r.values)},
                      {"strategy", strategy_json(m, r.strategy)},
                      {"iterations", r.iterations},
                      {"converged", converged}};
        j["params"] = {{"tol", a.params.tolerance},
                       {"max_iterations", a.params.max_iterations},
                       {"divergence_threshold", a.params.divergence_threshold}};
        write_json(a.json_path, j);
    }
    return converged ? kOk : kNotConverged;
}

// ---------------------------------------------------------------------------

struct LearnArgs {
    std::string model;
    LearnParams params;
    std::optional<std::uint64_t> seed;
    std::string schedule = "constant";
    std::size_t trials = 3;
    bool compare = false;
    unsigned threads = 1;
    std::string json_path;
    std::string csv_path;
};

int cmd_learn(LearnArgs a) {
    const Bmdp m = load_model(a.model);
    a.params.schedule = schedule_from(a.schedule);
    a.params.seed = resolve_seed(a.seed);
    if (a.trials == 0) throw InputError{"--trials must be at least 1"};
    const TrialSet set = run_trials(m, a.params, a.trials, a.threads);

    std::cout << "model " << model_label(m, a.model) << " (" << m.type_count() << " types)\n";
    for (std::size_t i = 0; i < a.trials; ++i) {
        const LearnResult& r = set.results[i];
        std::cout << "trial " << i + 1 << ": seed " << set.seeds[i] << ", estimate " << format_value(r.estimate)
                  << ", time " << std::fixed << std::setprecision(3) << set.seconds[i] << std::defaultfloat
                  << " s, strategy " << strategy_text(m, r.strategy) << '\n';
    }
    std::cout << "mean estimate " << format_value(set.mean_estimate) << '\n';
    std::cout << "time (avg.) " << std::fixed << std::setprecision(3) << set.mean_seconds << std::defaultfloat
              << " s\n";
    std::cout << "learned strategy " << strategy_text(m, set.strategy) << '\n';

    json j = report_json(model_label(m, a.model), m);
    int code = kOk;
    if (a.compare) {
        const SolveResult exact = value_iterate(m);
        const double optimal = config_value(exact.values, m.init);
        std::cout << "optimal cost " << format_value(optimal) << '\n';
        if (std::isfinite(optimal) && optimal > 0.0)
            std::cout << "relative error " << std::setprecision(3) << std::fixed
                      << 100.0 * std::abs(set.mean_estimate - optimal) / optimal << std::defaultfloat << "%\n";
        else
            std::cout << "relative error n/a\n";
        std::cout << "optimal strategy " << strategy_text(m, exact.strategy) << '\n';
        j["exact"] = {{"values", values_json(m, exact.values)}, {"strategy", strategy_json(m, exact.strategy)}};
        if (exact.status != SolveStatus::Converged) code = kNotConverged;
    }

    if (!a.csv_path.empty())
        for (std::size_t i = 0; i < a.trials; ++i) {
            std::ofstream out = open_output(trial_path(a.csv_path, i, a.trials));
            write_curve_csv(out, set.results[i].curve);
        }

    if (!a.json_path.empty()) {
        json trials = json::array();
        for (std::size_t i = 0; i < a.trials; ++i)
            trials.push_back({{"seed", set.seeds[i]},
                              {"estimate", value_json(set.results[i].estimate)},
                              {"time_seconds", set.seconds[i]},
                              {"strategy", strategy_json(m, set.results[i].strategy)}});
        j["learned"] = {{"estimate", value_json(set.mean_estimate)},
                        {"trials", trials},
                        {"strategy", strategy_json(m, set.strategy)},
                        {"time_seconds", set.mean_seconds}};
        j["params"] = learn_params_json(a.params, a.trials);
        write_json(a.json_path, j);
    }
    return code;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string model;
    std::string strategy = "optimal";
    std::size_t episodes = 10000;
    std::size_t max_steps = 10000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    bool trace = false;
    std::string json_path;
};

int cmd_simulate(const SimulateArgs& a) {
    const Bmdp m = load_model(a.model);
    StaticStrategy sigma;
    if (a.strategy == "optimal") {
        const SolveResult r = value_iterate(m);
        sigma = r.strategy;
    } else {
        sigma = parse_strategy_spec(m, a.strategy);
    }
    const std::uint64_t seed = resolve_seed(a.seed);
    const Rng rng(seed);

    if (a.trace) {
        Rng episode_rng = rng.split(0);
        const EpisodeResult ep = run_episode(m, m.init, sigma, a.max_steps, episode_rng, true);
        std::cout << "step\tentity\ttype\taction\tcost\tsize\n";
        write_trace(std::cout, m, ep.trace);
        std::cout << "episode total " << format_value(ep.total_cost) << ", " << ep.steps << " steps"
                  << (ep.terminated ? "" : " (truncated)") << '\n';
    }

    const MonteCarloEstimate e = monte_carlo_estimate(m, m.init, sigma, a.episodes, a.max_steps, rng, a.threads);
    std::cout << "strategy " << strategy_text(m, sigma) << '\n';
    std::cout << "episodes " << e.episodes << '\n';
    std::cout << "mean " << format_value(e.mean) << '\n';
    std::cout << "stderr " << format_value(e.stderr_of_mean) << '\n';
    std::cout << "truncated_fraction " << format_value(e.truncated_fraction) << '\n';

    if (!a.json_path.empty())
        write_json(a.json_path, {{"model", model_label(m, a.model)},
                                 {"strategy", strategy_json(m, sigma)},
                                 {"episodes", e.episodes},
                                 {"mean", value_json(e.mean)},
                                 {"stderr", value_json(e.stderr_of_mean)},
                                 {"truncated_fraction", e.truncated_fraction},
                                 {"params", {{"seed", seed}, {"max_steps", a.max_steps}}}});
    return kOk;
}

// ---------------------------------------------------------------------------

struct GenArgs {
    GenParams params;
    std::optional<std::uint64_t> seed;
    std::string output;
};

int cmd_gen(GenArgs a) {
    if (a.seed) {
        a.params.seed = *a.seed;
    } else {
        std::random_device rd;
        a.params.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        std::cerr << "seed " << a.params.seed << '\n';
    }
    try {
        a.params.check();
    } catch (const std::invalid_argument& e) {
        throw InputError{e.what()};
    }
    const std::string text = serialize_model(gen_random_bmdp(a.params));
    if (a.output.empty() || a.output == "-") {
        std::cout << text;
    } else {
        std::ofstream out = open_output(a.output);
        out << text;
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
    std::optional<std::string> suite_dir;
    LearnParams params;
    std::optional<std::uint64_t> seed;
    std::string schedule = "constant";
    std::size_t trials = 3;
    unsigned threads = 1;
    std::string json_path;
    std::string csv_path;
};

int cmd_bench(BenchArgs a) {
    a.params.schedule = schedule_from(a.schedule);
    a.params.seed = resolve_seed(a.seed);
    if (a.trials == 0) throw InputError{"--trials must be at least 1"};

    struct Entry {
        std::string name;
        std::optional<Bmdp> model;
        std::string error;
    };
    std::vector<Entry> entries;
    if (a.suite_dir) {
        std::error_code ec;
        if (!fs::is_directory(*a.suite_dir, ec)) throw InputError{"not a directory: " + *a.suite_dir};
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(*a.suite_dir))
            if (f.is_regular_file() && f.path().extension() == ".bmdp") files.push_back(f.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            ParseResult r = parse_model_file(f.string());
            if (auto* e = std::get_if<ParseError>(&r))
                entries.push_back({f.stem().string(), std::nullopt, "error: " + e->to_string()});
            else
                entries.push_back({f.stem().string(), std::get<Bmdp>(std::move(r)), ""});
        }
    } else {
        for (NamedModel& nm : embedded_suite()) entries.push_back({nm.name, std::move(nm.model), ""});
    }

    std::vector<BenchRow> rows;
    json out_rows = json::array();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        Entry& e = entries[i];
        BenchRow row;
        if (e.model) {
            LearnParams p = a.params;
            p.seed = trial_seed(a.params.seed, 1000 + i);
            try {
                row = bench_model(e.name, *e.model, p, a.trials, {}, a.threads);
            } catch (const std::exception& ex) {
                row.name = e.name;
                row.status = std::string("error: ") + ex.what();
            }
        } else {
            row.name = e.name;
            row.optimal_cost = std::nan("");
            row.estimated_cost = std::nan("");
            row.status = e.error;
        }
        rows.push_back(row);

        json j = json{{"model", row.name}, {"types", row.types}, {"exact", nullptr}, {"learned", nullptr}};
        if (e.model && !row.exact_values.empty())
            j["exact"] = {{"values", values_json(*e.model, row.exact_values)},
                          {"strategy", strategy_json(*e.model, row.exact_strategy)},
                          {"optimal_cost", value_json(row.optimal_cost)}};
        if (e.model && !row.trial_estimates.empty()) {
            json trials = json::array();
            for (double t : row.trial_estimates) trials.push_back(value_json(t));
            j["learned"] = {{"estimate", value_json(row.estimated_cost)},
                            {"trials", trials},
                            {"strategy", strategy_json(*e.model, row.learned_strategy)},
                            {"time_seconds", row.time_seconds}};
        }
        j["params"] = learn_params_json(a.params, a.trials);
        j["status"] = row.status;
        out_rows.push_back(j);
    }

    write_bench_table(std::cout, rows);
    if (!a.csv_path.empty()) {
        std::ofstream out = open_output(a.csv_path);
        write_bench_csv(out, rows);
    }
    if (!a.json_path.empty()) write_json(a.json_path, out_rows);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solve, learn and simulate branching Markov decision processes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "bmdp 0.1.0");

    SolveArgs solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Optimal expected total cost by value iteration");
    solve_cmd->add_option("model", solve.model, "Model file")->required();
    solve_cmd->add_option("--tol", solve.params.tolerance, "Stop when the sup-norm change drops below this")
        ->capture_default_str();
    solve_cmd->add_option("--max-iter", solve.params.max_iterations, "Iteration cap")->capture_default_str();
    solve_cmd->add_option("--vmax", solve.params.divergence_threshold, "Values above this count as infinite")
        ->capture_default_str();
    solve_cmd->add_option("--json", solve.json_path, "Write a JSON report");

    LearnArgs learn;
    CLI::App* learn_cmd = app.add_subcommand("learn", "Q-learning over independent trials");
    learn_cmd->add_option("model", learn.model, "Model file")->required();
    add_learn_options(*learn_cmd, learn.params, learn.seed, learn.schedule);
    learn_cmd->add_option("--trials", learn.trials, "Independent runs")->capture_default_str();
    learn_cmd->add_flag("--compare", learn.compare, "Also solve exactly and print the relative error");
    learn_cmd->add_option("--threads", learn.threads, "Trials run in parallel")->capture_default_str();
    learn_cmd->add_option("--json", learn.json_path, "Write a JSON report");
    learn_cmd->add_option("--csv", learn.csv_path, "Learning curve CSV (one file per trial)");

    SimulateArgs sim;
    sim.threads = default_threads();
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of a static strategy");
    sim_cmd->add_option("model", sim.model, "Model file")->required();
    sim_cmd->add_option("--strategy", sim.strategy, "'optimal' or type=action pairs, e.g. T=a1,S=a2")
        ->capture_default_str();
    sim_cmd->add_option("-n,--episodes", sim.episodes, "Number of episodes")->capture_default_str();
    sim_cmd->add_option("--max-steps", sim.max_steps, "Steps before an episode is cut off")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Seed (drawn from the system when omitted)");
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (result does not depend on it)");
    sim_cmd->add_flag("--trace", sim.trace, "Print the steps of one episode");
    sim_cmd->add_option("--json", sim.json_path, "Write a JSON report");

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Write a random model");
    gen_cmd->add_option("--seed", gen.seed, "Generator seed (drawn from the system when omitted)");
    gen_cmd->add_option("--types", gen.params.n_types, "Number of types")->capture_default_str();
    gen_cmd->add_option("--max-actions", gen.params.max_actions)->capture_default_str();
    gen_cmd->add_option("--max-outcomes", gen.params.max_outcomes)->capture_default_str();
    gen_cmd->add_option("--max-offspring", gen.params.max_offspring_len, "Longest offspring list")
        ->capture_default_str();
    gen_cmd->add_option("--cost-low", gen.params.cost_low)->capture_default_str();
    gen_cmd->add_option("--cost-high", gen.params.cost_high)->capture_default_str();
    gen_cmd->add_flag("--subcritical,!--no-subcritical", gen.params.subcritical,
                      "Cap expected offspring per action at 0.9 (default on)");
    gen_cmd->add_flag("--hierarchical", gen.params.hierarchical, "Only spawn types with a higher index");
    gen_cmd->add_option("-o,--output", gen.output, "Output file (default stdout)");

    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Exact and learned cost for a suite of models");
    bench_cmd->add_option("suite_dir", bench.suite_dir, "Directory of .bmdp files (default: built-in suite)");
    add_learn_options(*bench_cmd, bench.params, bench.seed, bench.schedule);
    bench_cmd->add_option("--trials", bench.trials, "Runs per model")->capture_default_str();
    bench_cmd->add_option("--threads", bench.threads, "Trials run in parallel")->capture_default_str();
    bench_cmd->add_option("--json", bench.json_path, "Write rows as JSON");
    bench_cmd->add_option("--csv", bench.csv_path, "Write rows as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*solve_cmd) return cmd_solve(solve);
        if (*learn_cmd) return cmd_learn(learn);
        if (*sim_cmd) return cmd_simulate(sim);
        if (*gen_cmd) return cmd_gen(gen);
        if (*bench_cmd) return cmd_bench(bench);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.message << '\n';
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}
