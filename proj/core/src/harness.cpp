#include "gpmrpp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <initializer_list>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gpmrpp/program.hpp"
#include "gpmrpp/simulator.hpp"

namespace gpmrpp {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

/// Runs body(0) .. body(jobs - 1), job j on worker j % workers.  The
/// first exception thrown by any worker is rethrown on the caller.
void for_each_job(int jobs, int threads, const std::function<void(int)>& body) {
    const int workers = std::max(1, std::min(threads, jobs));
    if (workers == 1) {
        for (int j = 0; j < jobs; ++j) body(j);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int j = w; j < jobs; j += workers) body(j);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

int draw_seed_depth(const SeedDepthRange& range, Rng& rng) {
    return static_cast<int>(rng.uniform_int(range.lo, range.hi));
}

GeneratorParams base_params(const ExperimentSpec& spec) {
    GeneratorParams params;
    params.max_branching = spec.max_branching;
    return params;
}

int generations_until_first_record(std::span<const GenerationStats> history) {
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (history[i].best_total_steps != kUnlimitedSteps) {
            return static_cast<int>(i) + 1;
        }
    }
    return static_cast<int>(history.size());
}

void fill_instance_columns(TrialRecord& rec, const ProblemInstance& instance) {
    rec.nodes = instance.workspace.node_count();
    rec.leaves = static_cast<int>(instance.workspace.leaf_nodes().size());
    rec.robots = static_cast<int>(instance.robots.size());
}

/// Evolves on the single instance and fills in both sides of the record.
TrialRecord evolve_one_instance(const ProblemInstance& instance, const GPConfig& gp,
                                Rng& evo_rng, int trial, double x_key,
                                Clock::time_point started) {
    TrialRecord rec;
    rec.trial = trial;
    rec.x_key = x_key;
    fill_instance_columns(rec, instance);

    const std::int64_t cap = episode_step_cap(rec.nodes, rec.robots);
    const EvolveResult evolved = evolve(gp, {&instance, 1}, evo_rng);
    rec.gp_solved = evolved.best.has_value();
    rec.gp_steps = rec.gp_solved ? evolved.best_total_steps : cap;
    rec.generations = generations_until_first_record(evolved.history);

    const EpisodeResult base = greedy_baseline(instance, cap, gp.comm_radius);
    rec.baseline_solved = base.solved;
    rec.baseline_steps = base.steps_used;
    rec.wall_ms = ms_since(started);
    return rec;
}

/// Runs an already-evolved program on a fresh instance (no evolution).
TrialRecord replay_one_instance(const ProblemInstance& instance, const Program& program,
                                int trial, int comm_radius) {
    const auto started = Clock::now();
    TrialRecord rec;
    rec.trial = trial;
    fill_instance_columns(rec, instance);
    rec.x_key = rec.robots;

    const std::int64_t cap = episode_step_cap(rec.nodes, rec.robots);
    const EpisodeResult ep = run_episode(instance, program, cap, comm_radius);
    rec.gp_solved = ep.solved;
    rec.gp_steps = ep.steps_used;

    const EpisodeResult base = greedy_baseline(instance, cap, comm_radius);
    rec.baseline_solved = base.solved;
    rec.baseline_steps = base.steps_used;
    rec.wall_ms = ms_since(started);
    return rec;
}

const Program& baseline_program() {
    static const Program program =
        parse_program("(if-robot-at-destination (stay) (move-toward-objective))");
    return program;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void append_fields(std::string& out, std::initializer_list<std::string> fields) {
    bool first = true;
    for (const std::string& f : fields) {
        if (!first) out += ',';
        out += f;
        first = false;
    }
    out += '\n';
}

}  // namespace

void ExperimentSpec::validate() const {
    gp.validate();
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    if (threads < 1) throw std::invalid_argument("threads must be positive");
    if (max_branching < 1) throw std::invalid_argument("max_branching must be positive");
    for (const SeedDepthRange& r : {train_seed_depth, test_seed_depth}) {
        if (r.lo < 1 || r.hi < r.lo) {
            throw std::invalid_argument("seed depth range must satisfy 1 <= lo <= hi");
        }
    }
    if (fitness_set_size < 1) {
        throw std::invalid_argument("fitness_set_size must be positive");
    }
    if (test_count < 0) throw std::invalid_argument("test_count must be non-negative");
    if (leaf_multipliers.empty()) {
        throw std::invalid_argument("leaf_multipliers must not be empty");
    }
    for (const double m : leaf_multipliers) {
        if (!(m > 0)) throw std::invalid_argument("leaf multipliers must be positive");
    }
}

std::vector<TrialRecord> run_per_instance(const ExperimentSpec& spec) {
    spec.validate();
    const Rng root(spec.rng_seed);
    std::vector<TrialRecord> records(spec.trials);
    for_each_job(spec.trials, spec.threads, [&](int trial) {
        const auto started = Clock::now();
        Rng trial_rng = root.split(rng_tag::kTrialBase + trial);
        GeneratorParams params = base_params(spec);
        params.seed_depth = draw_seed_depth(spec.train_seed_depth, trial_rng);
        const ProblemInstance instance =
            generate_instance(params, trial_rng, "trial-" + std::to_string(trial));
        Rng evo_rng = trial_rng.split(rng_tag::kEvolution);
        records[trial] =
            evolve_one_instance(instance, spec.gp, evo_rng, trial,
                                static_cast<double>(instance.robots.size()), started);
    });
    return records;
}

GeneralizeResult run_generalize(const ExperimentSpec& spec) {
    spec.validate();
    const Rng root(spec.rng_seed);

    std::vector<ProblemInstance> train;
    train.reserve(spec.fitness_set_size);
    for (int i = 0; i < spec.fitness_set_size; ++i) {
        Rng inst_rng = root.split(rng_tag::kTrialBase + i);
        GeneratorParams params = base_params(spec);
        params.seed_depth = draw_seed_depth(spec.train_seed_depth, inst_rng);
        train.push_back(generate_instance(params, inst_rng, "train-" + std::to_string(i)));
    }

    Rng evo_rng = root.split(rng_tag::kEvolution);
    EvolveOptions options;
    options.threads = spec.threads;
    const EvolveResult evolved = evolve(spec.gp, train, evo_rng, options);

    GeneralizeResult result;
    result.found = evolved.best.has_value();
    result.program = result.found ? *evolved.best : evolved.best_effort;
    result.best_fitness = result.found ? 0 : evolved.best_effort_fitness;

    result.train_records.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        result.train_records.push_back(replay_one_instance(
            train[i], result.program, static_cast<int>(i), spec.gp.comm_radius));
    }

    Rng test_rng = root.split(rng_tag::kTestInstances);
    result.test_records.reserve(spec.test_count);
    for (int j = 0; j < spec.test_count; ++j) {
        GeneratorParams params = base_params(spec);
        params.seed_depth = draw_seed_depth(spec.test_seed_depth, test_rng);
        const ProblemInstance instance =
            generate_instance(params, test_rng, "test-" + std::to_string(j));
        result.test_records.push_back(
            replay_one_instance(instance, result.program, j, spec.gp.comm_radius));
    }
    return result;
}

std::vector<TrialRecord> run_stress(const ExperimentSpec& spec) {
    spec.validate();
    const Rng root(spec.rng_seed);
    const int per_group = spec.trials;
    const int jobs = static_cast<int>(spec.leaf_multipliers.size()) * per_group;
    std::vector<TrialRecord> records(jobs);
    for_each_job(jobs, spec.threads, [&](int job) {
        const int group = job / per_group;
        const int trial = job % per_group;
        const double multiplier = spec.leaf_multipliers[group];
        const auto started = Clock::now();

        // One stream per trial index, shared across multipliers, so every
        // density level sees the same sequence of trees and only the robot
        // count varies.
        Rng trial_rng = root.split(rng_tag::kTrialBase + trial);
        GeneratorParams params = base_params(spec);
        params.seed_depth = draw_seed_depth(spec.train_seed_depth, trial_rng);
        params.robot_count_rule = RobotCountRule::kLeafMultiplier;
        params.leaf_multiplier = multiplier;
        const ProblemInstance instance =
            generate_instance(params, trial_rng, "stress-" + std::to_string(trial));
        Rng evo_rng = trial_rng.split(rng_tag::kEvolution).split(group + 1);
        records[job] =
            evolve_one_instance(instance, spec.gp, evo_rng, trial, multiplier, started);
    });
    return records;
}

EpisodeResult greedy_baseline(const ProblemInstance& problem, std::int64_t step_cap,
                              int comm_radius) {
    return run_episode(problem, baseline_program(), step_cap, comm_radius);
}

std::vector<SummaryRow> aggregate(std::span<const TrialRecord> records) {
    struct Accum {
        int n = 0;
        int gp_solved = 0;
        int baseline_solved = 0;
        std::vector<double> solved_steps;
    };
    std::map<double, Accum> groups;
    for (const TrialRecord& rec : records) {
        Accum& acc = groups[rec.x_key];
        ++acc.n;
        if (rec.gp_solved) {
            ++acc.gp_solved;
            acc.solved_steps.push_back(static_cast<double>(rec.gp_steps));
        }
        if (rec.baseline_solved) ++acc.baseline_solved;
    }

    std::vector<SummaryRow> rows;
    rows.reserve(groups.size());
    for (const auto& [x_key, acc] : groups) {
        SummaryRow row;
        row.x_key = x_key;
        row.n = acc.n;
        if (acc.solved_steps.empty()) {
            row.mean_steps = std::numeric_limits<double>::quiet_NaN();
            row.std_steps = std::numeric_limits<double>::quiet_NaN();
        } else {
            double sum = 0;
            for (const double s : acc.solved_steps) sum += s;
            row.mean_steps = sum / static_cast<double>(acc.solved_steps.size());
            double sq = 0;
            for (const double s : acc.solved_steps) {
                sq += (s - row.mean_steps) * (s - row.mean_steps);
            }
            row.std_steps = std::sqrt(sq / static_cast<double>(acc.solved_steps.size()));
        }
        row.gp_solved_frac = static_cast<double>(acc.gp_solved) / acc.n;
        row.baseline_solved_frac = static_cast<double>(acc.baseline_solved) / acc.n;
        rows.push_back(row);
    }
    return rows;
}

std::string records_csv(std::span<const TrialRecord> records) {
    std::string out =
        "trial,x_key,nodes,leaves,robots,gp_solved,gp_steps,"
        "baseline_solved,baseline_steps,generations,wall_ms\n";
    for (const TrialRecord& r : records) {
        append_fields(out, {std::to_string(r.trial), fmt(r.x_key), std::to_string(r.nodes),
                            std::to_string(r.leaves), std::to_string(r.robots),
                            std::to_string(r.gp_solved ? 1 : 0), std::to_string(r.gp_steps),
                            std::to_string(r.baseline_solved ? 1 : 0),
                            std::to_string(r.baseline_steps), std::to_string(r.generations),
                            std::to_string(r.wall_ms)});
    }
    return out;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
    std::string out = "x_key,n,mean_steps,std_steps,gp_solved_frac,baseline_solved_frac\n";
    for (const SummaryRow& r : rows) {
        append_fields(out, {fmt(r.x_key), std::to_string(r.n), fmt(r.mean_steps),
                            fmt(r.std_steps), fmt(r.gp_solved_frac),
                            fmt(r.baseline_solved_frac)});
    }
    return out;
}

std::string history_csv(std::span<const GenerationStats> history) {
    std::string out = "run,generation,best_fitness,mean_fitness,tau_b,solved_count\n";
    for (const GenerationStats& g : history) {
        const std::string budget = g.best_total_steps == kUnlimitedSteps
                                       ? "inf"
                                       : std::to_string(g.best_total_steps);
        append_fields(out, {std::to_string(g.run), std::to_string(g.generation),
                            std::to_string(g.best_fitness), fmt(g.mean_fitness), budget,
                            std::to_string(g.solved_count)});
    }
    return out;
}

}  // namespace gpmrpp
