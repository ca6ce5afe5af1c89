#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gpmrpp/program.hpp"
#include "gpmrpp/simulator.hpp"
#include "gpmrpp/workspace.hpp"

namespace gpmrpp {

/// Sentinel for "no step budget yet": no program has solved the whole
/// fitness set so far.
inline constexpr std::int64_t kUnlimitedSteps = std::numeric_limits<std::int64_t>::max();

struct GPConfig {
    int population_size = 2000;
    int runs = 5;                    // independent restarts sharing one record
    int generations = 400;           // per run
    double reproduction_rate = 0.1;
    double crossover_rate = 0.8;
    double mutation_rate = 0.1;
    int init_max_depth = 2;          // also the mutation subtree limit
    int max_depth = 50;
    int comm_radius = 2;

    /// Throws std::invalid_argument on nonsense values; the three
    /// operator rates must sum to 1 within 1e-12.
    void validate() const;
};

struct EvaluationResult {
    std::int64_t fitness = 0;                    // 0 iff every example solved
    std::vector<std::int64_t> per_example_steps; // solving step or the cap charged
    bool all_solved = false;
    std::int64_t total_steps = 0;                // sum of per_example_steps
};

/// Scores a program against every example in order.  Each example may use
/// up to node_count^2 * robot_count^2 steps, shrunk by whatever remains
/// of step_budget; once the budget is gone, later examples are charged
/// zero steps and scored at their start positions.  Unsolved examples add
/// the sum of squared tree distances from each robot's final position to
/// its goal.
EvaluationResult compute_fitness(const Program& program,
                                 std::span<const ProblemInstance> examples,
                                 std::int64_t step_budget = kUnlimitedSteps,
                                 int comm_radius = 2);

/// Fitness-proportionate weights: w_k = (1/(1+F_k)) / sum_j (1/(1+F_j)).
std::vector<double> selection_weights(std::span<const std::int64_t> fitnesses);

/// `count` independent copies of weight-selected individuals.
std::vector<Program> asexual_reproduction(std::span<const Program> population,
                                          std::span<const double> weights, int count, Rng& rng);

/// Swaps the subtrees under one uniformly chosen node per parent.  When
/// an offspring would be rooted at a terminal or exceed max_depth, the
/// points are redrawn, up to 10 times; after that copies of the parents
/// come back.  Parents are never modified.
std::pair<Program, Program> crossover(const Program& a, const Program& b, int max_depth,
                                      Rng& rng);

/// Replaces the subtree under one uniformly chosen node with a freshly
/// grown one (max depth subtree_max_depth; a replacement at the root is
/// grown function-rooted).  Redraws up to 10 times if max_depth would be
/// exceeded, then returns a copy of the parent.
Program mutate(const Program& parent, int subtree_max_depth, int max_depth, Rng& rng);

struct GenerationStats {
    int run = 0;            // 1-based
    int generation = 0;     // 1-based within the run
    std::int64_t best_fitness = 0;
    double mean_fitness = 0.0;
    std::int64_t best_total_steps = kUnlimitedSteps;  // record after this generation
    int solved_count = 0;   // programs with fitness 0 this generation
    int population_size = 0;
};

struct GenerationView {
    std::span<const Program> population;
    std::span<const EvaluationResult> evaluations;
    const GenerationStats& stats;
};

struct EvolveOptions {
    /// Worker threads for fitness evaluation.  Results are identical for
    /// any thread count: the whole generation is evaluated against the
    /// generation-start budget and record updates happen in index order.
    int threads = 1;
    std::function<void(const GenerationView&)> observer;
};

struct EvolveResult {
    /// Record holder: first program to solve every example within the
    /// then-current budget.  Absent when no program ever did.
    std::optional<Program> best;
    std::int64_t best_total_steps = kUnlimitedSteps;

    /// Lowest-fitness program seen anywhere, for callers that want a
    /// usable policy even when nothing reached fitness 0.
    Program best_effort;
    std::int64_t best_effort_fitness = std::numeric_limits<std::int64_t>::max();

    std::vector<GenerationStats> history;   // runs * generations rows
};

/// Full evolution: `runs` independent populations of random programs,
/// each advanced `generations` times with reproduction, crossover and
/// mutation; the step record and record holder carry across runs.
EvolveResult evolve(const GPConfig& config, std::span<const ProblemInstance> examples,
                    Rng& rng, const EvolveOptions& options = {});

}  // namespace gpmrpp
