// gpmrpp: evolves, inspects and benchmarks decision-tree navigation
// programs for robot fleets on tree-shaped single-lane roadmaps.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpmrpp/evolution.hpp"
#include "gpmrpp/harness.hpp"
#include "gpmrpp/problem_io.hpp"
#include "gpmrpp/program.hpp"
#include "gpmrpp/rng.hpp"
#include "gpmrpp/simulator.hpp"
#include "gpmrpp/workspace.hpp"

namespace {

using namespace gpmrpp;

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const std::uint64_t value = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw std::invalid_argument(what + " must be an unsigned integer, got '" + text + "'");
    }
}

/// --seed beats GPMRPP_SEED beats system entropy; an entropy draw is
/// printed so the run can be replayed.
std::uint64_t resolve_seed(const std::string& seed_text) {
    if (!seed_text.empty()) return parse_u64(seed_text, "--seed");
    std::random_device device;
    const std::uint64_t seed =
        (static_cast<std::uint64_t>(device()) << 32) ^ static_cast<std::uint64_t>(device());
    std::printf("seed=%llu\n", static_cast<unsigned long long>(seed));
    return seed;
}

SeedDepthRange parse_depth_range(const std::string& text, const std::string& flag) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument(flag + " expects lo:hi, got '" + text + "'");
    }
    SeedDepthRange range;
    try {
        std::size_t pos = 0;
        range.lo = std::stoi(text.substr(0, colon), &pos);
        if (pos != colon) throw std::invalid_argument(text);
        const std::string hi = text.substr(colon + 1);
        range.hi = std::stoi(hi, &pos);
        if (pos != hi.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw std::invalid_argument(flag + " expects lo:hi, got '" + text + "'");
    }
    return range;
}

void apply_robot_rule(const std::string& text, GeneratorParams& params) {
    if (text == "leaves-minus-one") {
        params.robot_count_rule = RobotCountRule::kLeavesMinusOne;
        return;
    }
    if (text.rfind("multiplier:", 0) == 0) {
        params.robot_count_rule = RobotCountRule::kLeafMultiplier;
        const std::string value = text.substr(11);
        try {
            std::size_t pos = 0;
            params.leaf_multiplier = std::stod(value, &pos);
            if (pos != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw std::invalid_argument("--robots multiplier:<x> needs a number, got '" +
                                        value + "'");
        }
        if (!(params.leaf_multiplier > 0)) {
            throw std::invalid_argument("--robots multiplier must be positive");
        }
        return;
    }
    if (text.rfind("explicit:", 0) == 0) {
        params.robot_count_rule = RobotCountRule::kExplicit;
        params.explicit_count =
            static_cast<int>(parse_u64(text.substr(9), "--robots explicit:<k>"));
        if (params.explicit_count < 1) {
            throw std::invalid_argument("--robots explicit:<k> needs at least 1 robot");
        }
        return;
    }
    throw std::invalid_argument(
        "--robots must be leaves-minus-one, multiplier:<x> or explicit:<k>, got '" + text +
        "'");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void add_gp_options(CLI::App& cmd, GPConfig& gp, int& threads) {
    cmd.add_option("--population", gp.population_size, "Programs per generation")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--runs", gp.runs, "Independent evolution restarts")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--generations", gp.generations, "Generations per run")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--pa", gp.reproduction_rate, "Reproduction (copy) rate")
        ->capture_default_str();
    cmd.add_option("--pc", gp.crossover_rate, "Crossover rate")->capture_default_str();
    cmd.add_option("--pm", gp.mutation_rate, "Mutation rate")->capture_default_str();
    cmd.add_option("--init-depth", gp.init_max_depth,
                   "Depth limit for initial programs and mutation subtrees")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--max-depth", gp.max_depth, "Depth limit for evolved programs")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--comm-radius", gp.comm_radius,
                   "Tree distance robots can sense each other across")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--threads", threads, "Worker threads for fitness evaluation")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

struct GenFlags {
    int count = 1;
    int seed_depth = 4;
    int branching = 4;
    std::string robots = "leaves-minus-one";
    std::string out = ".";
};

int cmd_gen(const GenFlags& flags, const std::string& seed_text) {
    GeneratorParams params;
    params.seed_depth = flags.seed_depth;
    params.max_branching = flags.branching;
    apply_robot_rule(flags.robots, params);

    const std::uint64_t seed = resolve_seed(seed_text);
    std::filesystem::create_directories(flags.out);
    const Rng root(seed);
    for (int i = 0; i < flags.count; ++i) {
        Rng inst_rng = root.split(rng_tag::kTrialBase + i);
        const std::string name = "problem-" + std::to_string(i);
        const ProblemInstance instance = generate_instance(params, inst_rng, name);
        const auto path = std::filesystem::path(flags.out) / (name + ".txt");
        save_problem_file(instance, path.string());
        std::printf("%s nodes=%d leaves=%d robots=%d\n", path.string().c_str(),
                    instance.workspace.node_count(),
                    static_cast<int>(instance.workspace.leaf_nodes().size()),
                    static_cast<int>(instance.robots.size()));
    }
    return 0;
}

struct TrainFlags {
    std::vector<std::string> problems;
    std::string out = "program.txt";
    std::string history;
};

int cmd_train(const TrainFlags& flags, const GPConfig& gp, int threads,
              const std::string& seed_text, int verbose) {
    gp.validate();
    std::vector<ProblemInstance> examples;
    examples.reserve(flags.problems.size());
    for (const std::string& path : flags.problems) {
        examples.push_back(load_problem_file(path));
    }

    const std::uint64_t seed = resolve_seed(seed_text);
    Rng root(seed);
    Rng evo_rng = root.split(rng_tag::kEvolution);

    EvolveOptions options;
    options.threads = threads;
    if (verbose >= 1) {
        options.observer = [](const GenerationView& view) {
            const GenerationStats& s = view.stats;
            const std::string tau = s.best_total_steps == kUnlimitedSteps
                                        ? "inf"
                                        : std::to_string(s.best_total_steps);
            std::fprintf(stderr, "run=%d gen=%d best=%lld solved=%d tau_b=%s\n", s.run,
                         s.generation, static_cast<long long>(s.best_fitness),
                         s.solved_count, tau.c_str());
        };
    }

    const EvolveResult result = evolve(gp, examples, evo_rng, options);
    if (result.best.has_value()) {
        save_program_file(*result.best, flags.out,
                          "fitness 0, total steps " +
                              std::to_string(result.best_total_steps));
        std::printf("solved=true total_steps=%lld program=%s\n",
                    static_cast<long long>(result.best_total_steps), flags.out.c_str());
    } else {
        save_program_file(result.best_effort, flags.out,
                          "best fitness " + std::to_string(result.best_effort_fitness) +
                              ", no full solution found");
        std::printf("solved=false best_fitness=%lld program=%s\n",
                    static_cast<long long>(result.best_effort_fitness), flags.out.c_str());
    }
    if (!flags.history.empty()) {
        write_file(flags.history, history_csv(result.history));
    }
    return 0;
}

struct RunFlags {
    std::string program;
    std::string problem;
    std::int64_t cap = -1;   // negative: per-instance default cap
    bool trace = false;
    int comm_radius = 2;
};

int cmd_run(const RunFlags& flags) {
    const Program program = load_program_file(flags.program);
    const ProblemInstance problem = load_problem_file(flags.problem);

    EpisodeOptions options;
    options.step_cap = flags.cap >= 0
                           ? flags.cap
                           : episode_step_cap(problem.workspace.node_count(),
                                              static_cast<int>(problem.robots.size()));
    options.comm_radius = flags.comm_radius;
    if (flags.trace) options.trace = &std::cout;

    const EpisodeResult episode = run_episode(problem, program, options);
    std::printf("solved=%s steps=%lld\n", episode.solved ? "true" : "false",
                static_cast<long long>(episode.steps_used));
    return 0;
}

struct ExperimentFlags {
    std::string mode;
    std::string train_depths = "4:10";
    std::string test_depths = "4:9";
    std::string records = "records.csv";
    std::string summary = "summary.csv";
    std::string program_out;
};

int cmd_experiment(const ExperimentFlags& flags, ExperimentSpec spec,
                   const std::string& seed_text, int verbose) {
    if (flags.mode == "per-instance") {
        spec.mode = ExperimentSpec::Mode::kPerInstance;
    } else if (flags.mode == "generalize") {
        spec.mode = ExperimentSpec::Mode::kGeneralize;
    } else if (flags.mode == "stress") {
        spec.mode = ExperimentSpec::Mode::kStress;
    } else {
        throw std::invalid_argument("unknown mode '" + flags.mode + "'");
    }
    spec.train_seed_depth = parse_depth_range(flags.train_depths, "--train-depths");
    spec.test_seed_depth = parse_depth_range(flags.test_depths, "--test-depths");
    spec.rng_seed = resolve_seed(seed_text);
    spec.validate();

    std::vector<TrialRecord> records;
    switch (spec.mode) {
        case ExperimentSpec::Mode::kPerInstance:
            records = run_per_instance(spec);
            break;
        case ExperimentSpec::Mode::kStress:
            records = run_stress(spec);
            break;
        case ExperimentSpec::Mode::kGeneralize: {
            const GeneralizeResult result = run_generalize(spec);
            int train_solved = 0;
            for (const TrialRecord& r : result.train_records) {
                train_solved += r.gp_solved ? 1 : 0;
            }
            std::printf("found=%s best_fitness=%lld train_solved=%d/%d\n",
                        result.found ? "true" : "false",
                        static_cast<long long>(result.best_fitness), train_solved,
                        static_cast<int>(result.train_records.size()));
            if (!flags.program_out.empty()) {
                save_program_file(result.program, flags.program_out,
                                  result.found
                                      ? "fitness 0 on the training set"
                                      : "best fitness " +
                                            std::to_string(result.best_fitness));
            }
            records = result.test_records;
            break;
        }
    }

    if (verbose >= 1) {
        std::fputs(records_csv(records).c_str(), stderr);
    }
    const std::vector<SummaryRow> summary = aggregate(records);
    write_file(flags.records, records_csv(records));
    write_file(flags.summary, summary_csv(summary));
    std::printf("records=%d groups=%d records_csv=%s summary_csv=%s\n",
                static_cast<int>(records.size()), static_cast<int>(summary.size()),
                flags.records.c_str(), flags.summary.c_str());
    return 0;
}

int cmd_scenarios(const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const ProblemInstance& instance : canonical_scenarios()) {
        const auto path = std::filesystem::path(out_dir) / (instance.label + ".txt");
        save_problem_file(instance, path.string());
        std::printf("%s nodes=%d robots=%d\n", path.string().c_str(),
                    instance.workspace.node_count(),
                    static_cast<int>(instance.robots.size()));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Evolves and runs decision-tree navigation programs for robot fleets\n"
        "on tree-shaped single-lane roadmaps."};
    app.require_subcommand(1);
    app.fallthrough();   // lets --seed / -v appear after the subcommand name

    std::string seed_text;
    int verbose = 0;
    app.add_option("--seed", seed_text,
                   "Random seed; defaults to $GPMRPP_SEED, then system entropy")
        ->envname("GPMRPP_SEED");
    app.add_flag("-v,--verbose", verbose, "Increase diagnostic output");

    GenFlags gen_flags;
    CLI::App* gen = app.add_subcommand("gen", "Generate random problem files");
    gen->add_option("--count", gen_flags.count, "Problems to generate")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed-depth", gen_flags.seed_depth, "Tree generator recursion budget")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    gen->add_option("--branching", gen_flags.branching, "Max children per tree node")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    gen->add_option("--robots", gen_flags.robots,
                    "leaves-minus-one, multiplier:<x> or explicit:<k>")
        ->capture_default_str();
    gen->add_option("--out", gen_flags.out, "Output directory")->capture_default_str();

    TrainFlags train_flags;
    GPConfig train_gp;
    int train_threads = 1;
    CLI::App* train =
        app.add_subcommand("train", "Evolve a navigation program on problem files");
    train->add_option("problems", train_flags.problems, "Problem files to train on")
        ->required()
        ->check(CLI::ExistingFile);
    train->add_option("--out", train_flags.out, "Evolved program output path")
        ->capture_default_str();
    train->add_option("--history", train_flags.history,
                      "Per-generation statistics CSV output path");
    add_gp_options(*train, train_gp, train_threads);

    RunFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "Run a program on one problem");
    run->add_option("--program", run_flags.program, "Program file")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--problem", run_flags.problem, "Problem file")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--cap", run_flags.cap,
                    "Step cap; default nodes^2 * robots^2 for the problem")
        ->capture_default_str();
    run->add_flag("--trace", run_flags.trace, "Print per-step robot positions");
    run->add_option("--comm-radius", run_flags.comm_radius,
                    "Tree distance robots can sense each other across")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);

    ExperimentFlags exp_flags;
    ExperimentSpec exp_spec;
    CLI::App* experiment =
        app.add_subcommand("experiment", "Batched evolution runs with CSV output");
    experiment->add_option("--mode", exp_flags.mode, "per-instance, generalize or stress")
        ->required()
        ->check(CLI::IsMember({"per-instance", "generalize", "stress"}));
    experiment->add_option("--trials", exp_spec.trials, "Instances per configuration")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    experiment
        ->add_option("--train-depths", exp_flags.train_depths,
                     "Training-instance seed depth range lo:hi")
        ->capture_default_str();
    experiment
        ->add_option("--test-depths", exp_flags.test_depths,
                     "Test-instance seed depth range lo:hi (generalize mode)")
        ->capture_default_str();
    experiment->add_option("--branching", exp_spec.max_branching, "Max children per tree node")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    experiment
        ->add_option("--fitness-set", exp_spec.fitness_set_size,
                     "Training instances per evolution (generalize mode)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    experiment
        ->add_option("--test-count", exp_spec.test_count,
                     "Held-out test instances (generalize mode)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    experiment
        ->add_option("--multipliers", exp_spec.leaf_multipliers,
                     "Robot-density multipliers (stress mode)")
        ->delimiter(',')
        ->capture_default_str();
    experiment->add_option("--records", exp_flags.records, "Per-trial records CSV path")
        ->capture_default_str();
    experiment->add_option("--summary", exp_flags.summary, "Aggregated summary CSV path")
        ->capture_default_str();
    experiment->add_option("--program-out", exp_flags.program_out,
                           "Save the evolved program here (generalize mode)");
    add_gp_options(*experiment, exp_spec.gp, exp_spec.threads);

    std::string scenarios_out = ".";
    CLI::App* scenarios =
        app.add_subcommand("scenarios", "Write the built-in swap fixtures as problem files");
    scenarios->add_option("--out", scenarios_out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_flags, seed_text);
        if (train->parsed()) {
            return cmd_train(train_flags, train_gp, train_threads, seed_text, verbose);
        }
        if (run->parsed()) return cmd_run(run_flags);
        if (experiment->parsed()) {
            return cmd_experiment(exp_flags, exp_spec, seed_text, verbose);
        }
        if (scenarios->parsed()) return cmd_scenarios(scenarios_out);
        std::fprintf(stderr, "error: no subcommand\n");
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
