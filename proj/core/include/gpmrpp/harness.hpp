#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gpmrpp/evolution.hpp"
#include "gpmrpp/workspace.hpp"

namespace gpmrpp {

struct SeedDepthRange {
    int lo = 4;
    int hi = 10;
};

/// Evolution sized for minutes-long desk runs rather than the hours-long
/// full configuration that GPConfig defaults to.
inline GPConfig desk_scale_gp() {
    GPConfig gp;
    gp.population_size = 300;
    gp.generations = 60;
    gp.runs = 2;
    return gp;
}

struct ExperimentSpec {
    enum class Mode { kPerInstance, kGeneralize, kStress };
    Mode mode = Mode::kPerInstance;

    int trials = 20;
    SeedDepthRange train_seed_depth{4, 10};
    SeedDepthRange test_seed_depth{4, 9};
    int max_branching = 4;
    int fitness_set_size = 5;                          // generalize: |training set|
    int test_count = 20;                               // generalize: held-out instances
    std::vector<double> leaf_multipliers{0.25, 0.5, 1.0, 1.5};
    GPConfig gp = desk_scale_gp();
    std::uint64_t rng_seed = 0;
    int threads = 1;                                   // concurrent trials

    void validate() const;
};

/// One instance's outcome.  x_key is the robot count for per-instance
/// and generalize runs, the leaf multiplier for stress runs.  Steps of an
/// unsolved side record the step cap that was exhausted.
struct TrialRecord {
    int trial = 0;
    double x_key = 0;
    int nodes = 0;
    int leaves = 0;
    int robots = 0;
    bool gp_solved = false;
    std::int64_t gp_steps = 0;
    bool baseline_solved = false;
    std::int64_t baseline_steps = 0;
    int generations = 0;      // evaluated until the first full solve (all, if none)
    std::int64_t wall_ms = 0;
};

/// Evolves on each random instance separately (robots = leaf count - 1,
/// clamped) and compares against the greedy baseline on the same
/// instance.  Trials may run concurrently; records come back in trial
/// order either way.
std::vector<TrialRecord> run_per_instance(const ExperimentSpec& spec);

struct GeneralizeResult {
    bool found = false;               // a fitness-0 program emerged in training
    std::int64_t best_fitness = 0;    // of the program actually tested
    Program program;
    std::vector<TrialRecord> train_records;
    std::vector<TrialRecord> test_records;
};

/// Trains one program on fitness_set_size instances, then replays it on
/// test_count fresh instances drawn from an independent stream.  When
/// training never reaches fitness 0 the best-effort program is tested
/// instead and `found` stays false.
GeneralizeResult run_generalize(const ExperimentSpec& spec);

/// Per-instance evolution across robot densities: for every multiplier m
/// in leaf_multipliers, `trials` instances with floor(m * leaf_count)
/// robots (floored at 1, clamped to node_count - 2).
std::vector<TrialRecord> run_stress(const ExperimentSpec& spec);

/// Each robot walks its tree path to its goal and waits whenever the
/// next node is occupied, under the simulator's sequential step
/// semantics.  Complete for conflict-free routes; deadlocks whenever two
/// robots need to pass through each other.
EpisodeResult greedy_baseline(const ProblemInstance& problem, std::int64_t step_cap,
                              int comm_radius = 2);

struct SummaryRow {
    double x_key = 0;
    int n = 0;
    double mean_steps = 0;      // over GP-solved records in the group
    double std_steps = 0;       // population standard deviation
    double gp_solved_frac = 0;
    double baseline_solved_frac = 0;
};

/// Groups records by x_key ascending.  mean/std cover gp_steps of the
/// GP-solved records in each group (NaN when the group has none).
std::vector<SummaryRow> aggregate(std::span<const TrialRecord> records);

/// CSV renderings, headers included, '\n' line ends, locale independent.
std::string records_csv(std::span<const TrialRecord> records);
std::string summary_csv(std::span<const SummaryRow> rows);
std::string history_csv(std::span<const GenerationStats> history);

}  // namespace gpmrpp
