#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpmrpp/harness.hpp"
#include "gpmrpp/problem_io.hpp"
#include "gpmrpp/simulator.hpp"
#include "gpmrpp/workspace.hpp"

using namespace gpmrpp;

namespace {

using Edges = std::vector<std::pair<NodeId, NodeId>>;

ProblemInstance chain_problem(int n, std::vector<RobotSpec> robots) {
    Edges edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
    return {Workspace(n, edges), std::move(robots), "chain"};
}

// Small evolution so harness tests stay in the seconds range.
GPConfig tiny_gp() {
    GPConfig gp;
    gp.population_size = 60;
    gp.generations = 8;
    gp.runs = 1;
    return gp;
}

bool equal_ignoring_wall(const TrialRecord& a, const TrialRecord& b) {
    return a.trial == b.trial && a.x_key == b.x_key && a.nodes == b.nodes &&
           a.leaves == b.leaves && a.robots == b.robots && a.gp_solved == b.gp_solved &&
           a.gp_steps == b.gp_steps && a.baseline_solved == b.baseline_solved &&
           a.baseline_steps == b.baseline_steps && a.generations == b.generations;
}

}  // namespace

TEST_CASE("the greedy baseline walks a lone robot straight to its goal") {
    ProblemInstance p = chain_problem(5, {{0, 0, 4}});
    EpisodeResult r = greedy_baseline(p, 100);
    CHECK(r.solved);
    CHECK(r.steps_used == 4);
}

TEST_CASE("the greedy baseline handles follow-the-leader traffic") {
    ProblemInstance p = chain_problem(5, {{0, 2, 4}, {1, 1, 3}, {2, 0, 2}});
    EpisodeResult r = greedy_baseline(p, 100);
    CHECK(r.solved);
    CHECK(r.steps_used == 2);
    CHECK(r.final_positions == std::vector<NodeId>{4, 3, 2});
}

TEST_CASE("the greedy baseline solves single-robot instances in exactly the tree distance") {
    Rng rng(19);
    GeneratorParams params;
    params.seed_depth = 3;
    for (int i = 0; i < 60; ++i) {
        Workspace ws = generate_mst(params, rng);
        if (ws.node_count() < 3) continue;
        ProblemInstance p = build_problem(ws, 1, rng);
        const std::int64_t cap = episode_step_cap(ws.node_count(), 1);
        EpisodeResult r = greedy_baseline(p, cap);
        CHECK(r.solved);
        CHECK(r.steps_used == ws.distance(p.robots[0].start, p.robots[0].goal));
    }
}

TEST_CASE("the greedy baseline deadlocks on every swap scenario") {
    for (const auto& scenario : canonical_scenarios()) {
        const std::int64_t cap = episode_step_cap(
            scenario.workspace.node_count(), static_cast<int>(scenario.robots.size()));
        EpisodeResult r = greedy_baseline(scenario, cap);
        CHECK_FALSE(r.solved);
        CHECK(r.steps_used == cap);
    }
}

TEST_CASE("experiment spec validation") {
    ExperimentSpec spec;
    CHECK_NOTHROW(spec.validate());

    ExperimentSpec bad = spec;
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = spec;
    bad.threads = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = spec;
    bad.train_seed_depth = {0, 4};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = spec;
    bad.test_seed_depth = {5, 4};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = spec;
    bad.leaf_multipliers = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = spec;
    bad.leaf_multipliers = {0.5, -1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = spec;
    bad.fitness_set_size = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("the desk-scale evolution settings are a valid config") {
    GPConfig gp = desk_scale_gp();
    CHECK_NOTHROW(gp.validate());
    CHECK(gp.population_size == 300);
    CHECK(gp.generations == 60);
    CHECK(gp.runs == 2);
    // everything else stays at the full-scale defaults
    CHECK(gp.crossover_rate == 0.8);
    CHECK(gp.max_depth == 50);
}

TEST_CASE("per-instance experiments fill consistent records in trial order") {
    ExperimentSpec spec;
    spec.trials = 3;
    spec.train_seed_depth = {2, 2};
    spec.max_branching = 3;
    spec.gp = tiny_gp();
    spec.rng_seed = 5;

    auto records = run_per_instance(spec);
    REQUIRE(records.size() == 3);
    for (int i = 0; i < 3; ++i) {
        const TrialRecord& rec = records[i];
        CHECK(rec.trial == i);
        CHECK(rec.nodes >= 3);
        // robot head count: leaves - 1, floored at 1, clamped to nodes - 2
        const int want_robots =
            std::max(1, std::min(rec.leaves - 1, rec.nodes - 2));
        CHECK(rec.robots == want_robots);
        CHECK(rec.x_key == static_cast<double>(rec.robots));

        const std::int64_t cap = episode_step_cap(rec.nodes, rec.robots);
        if (rec.gp_solved) {
            CHECK(rec.gp_steps >= 1);
            CHECK(rec.gp_steps <= cap);
        } else {
            CHECK(rec.gp_steps == cap);
        }
        CHECK(rec.baseline_steps <= cap);
        CHECK(rec.generations >= 1);
        CHECK(rec.generations <= spec.gp.runs * spec.gp.generations);
        CHECK(rec.wall_ms >= 0);
    }
}

TEST_CASE("per-instance experiments repeat identically, whatever the thread count") {
    ExperimentSpec spec;
    spec.trials = 3;
    spec.train_seed_depth = {2, 2};
    spec.max_branching = 3;
    spec.gp = tiny_gp();
    spec.rng_seed = 11;

    auto first = run_per_instance(spec);
    auto second = run_per_instance(spec);
    spec.threads = 2;
    auto threaded = run_per_instance(spec);

    REQUIRE(first.size() == second.size());
    REQUIRE(first.size() == threaded.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(equal_ignoring_wall(first[i], second[i]));
        CHECK(equal_ignoring_wall(first[i], threaded[i]));
    }
}

TEST_CASE("stress experiments vary the fleet, not the trees") {
    ExperimentSpec spec;
    spec.mode = ExperimentSpec::Mode::kStress;
    spec.trials = 2;
    spec.train_seed_depth = {2, 2};
    spec.max_branching = 3;
    spec.leaf_multipliers = {0.5, 1.0};
    spec.gp = tiny_gp();
    spec.rng_seed = 23;

    auto records = run_stress(spec);
    REQUIRE(records.size() == 4);   // 2 multipliers x 2 trials, group-major

    for (int group = 0; group < 2; ++group) {
        for (int trial = 0; trial < 2; ++trial) {
            const TrialRecord& rec = records[group * 2 + trial];
            CHECK(rec.trial == trial);
            CHECK(rec.x_key == spec.leaf_multipliers[group]);
            // floor(multiplier * leaves), floored at 1, clamped to nodes - 2
            const int by_rule = std::max(
                1, std::min(static_cast<int>(std::floor(spec.leaf_multipliers[group] *
                                                        rec.leaves)),
                            rec.nodes - 2));
            CHECK(rec.robots == by_rule);
        }
    }

    // The same trial index reuses the same workspace in every group.
    CHECK(records[0].nodes == records[2].nodes);
    CHECK(records[0].leaves == records[2].leaves);
    CHECK(records[1].nodes == records[3].nodes);
    CHECK(records[1].leaves == records[3].leaves);
}

TEST_CASE("generalize experiments train once and replay everywhere") {
    ExperimentSpec spec;
    spec.mode = ExperimentSpec::Mode::kGeneralize;
    spec.fitness_set_size = 2;
    spec.test_count = 3;
    spec.train_seed_depth = {2, 2};
    spec.test_seed_depth = {2, 2};
    spec.max_branching = 3;
    spec.gp = tiny_gp();
    spec.rng_seed = 3;

    GeneralizeResult result = run_generalize(spec);
    CHECK(result.train_records.size() == 2);
    CHECK(result.test_records.size() == 3);

    if (result.found) {
        CHECK(result.best_fitness == 0);
        // The trained program must still solve its own training set.
        for (const TrialRecord& rec : result.train_records) {
            CHECK(rec.gp_solved);
        }
    } else {
        CHECK(result.best_fitness > 0);
    }

    // Replays never run evolution, so no generation count is reported.
    for (const TrialRecord& rec : result.test_records) {
        CHECK(rec.generations == 0);
        CHECK(rec.x_key == static_cast<double>(rec.robots));
    }

    GeneralizeResult again = run_generalize(spec);
    CHECK(again.found == result.found);
    CHECK(serialize_program(again.program) == serialize_program(result.program));
    REQUIRE(again.test_records.size() == result.test_records.size());
    for (std::size_t i = 0; i < result.test_records.size(); ++i) {
        CHECK(equal_ignoring_wall(again.test_records[i], result.test_records[i]));
    }
}

TEST_CASE("aggregation groups by x key: means, spreads, fractions") {
    std::vector<TrialRecord> records(5);
    // group 1.0: solved in 2 and 4 steps, one baseline success
    records[0].x_key = 1.0;
    records[0].gp_solved = true;
    records[0].gp_steps = 2;
    records[0].baseline_solved = true;
    records[1].x_key = 1.0;
    records[1].gp_solved = true;
    records[1].gp_steps = 4;
    // group 0.5: nothing solved
    records[2].x_key = 0.5;
    records[2].gp_steps = 99;
    records[3].x_key = 0.5;
    // group 2.0: single solved record
    records[4].x_key = 2.0;
    records[4].gp_solved = true;
    records[4].gp_steps = 7;

    auto rows = aggregate(records);
    REQUIRE(rows.size() == 3);

    CHECK(rows[0].x_key == 0.5);        // ascending group order
    CHECK(rows[0].n == 2);
    CHECK(std::isnan(rows[0].mean_steps));
    CHECK(std::isnan(rows[0].std_steps));
    CHECK(rows[0].gp_solved_frac == 0.0);

    CHECK(rows[1].x_key == 1.0);
    CHECK(rows[1].n == 2);
    CHECK(rows[1].mean_steps == doctest::Approx(3.0));
    CHECK(rows[1].std_steps == doctest::Approx(1.0));   // population deviation
    CHECK(rows[1].gp_solved_frac == doctest::Approx(1.0));
    CHECK(rows[1].baseline_solved_frac == doctest::Approx(0.5));

    CHECK(rows[2].x_key == 2.0);
    CHECK(rows[2].std_steps == doctest::Approx(0.0));
}

TEST_CASE("records CSV: pinned header and plain integer fields") {
    TrialRecord rec;
    rec.trial = 0;
    rec.x_key = 1.0;
    rec.nodes = 5;
    rec.leaves = 2;
    rec.robots = 1;
    rec.gp_solved = true;
    rec.gp_steps = 6;
    rec.baseline_solved = false;
    rec.baseline_steps = 25;
    rec.generations = 3;
    rec.wall_ms = 17;

    CHECK(records_csv({&rec, 1}) ==
          "trial,x_key,nodes,leaves,robots,gp_solved,gp_steps,"
          "baseline_solved,baseline_steps,generations,wall_ms\n"
          "0,1,5,2,1,1,6,0,25,3,17\n");

    rec.x_key = 0.25;
    std::string csv = records_csv({&rec, 1});
    CHECK(csv.find("\n0,0.25,5,") != std::string::npos);
}

TEST_CASE("summary CSV: pinned header, missing means become nan") {
    SummaryRow solved;
    solved.x_key = 1.0;
    solved.n = 2;
    solved.mean_steps = 3.0;
    solved.std_steps = 1.0;
    solved.gp_solved_frac = 1.0;
    solved.baseline_solved_frac = 0.5;

    SummaryRow empty;
    empty.x_key = 1.5;
    empty.n = 4;
    empty.mean_steps = std::nan("");
    empty.std_steps = std::nan("");
    empty.gp_solved_frac = 0.0;
    empty.baseline_solved_frac = 0.25;

    std::vector<SummaryRow> rows{solved, empty};
    CHECK(summary_csv(rows) ==
          "x_key,n,mean_steps,std_steps,gp_solved_frac,baseline_solved_frac\n"
          "1,2,3,1,1,0.5\n"
          "1.5,4,nan,nan,0,0.25\n");
}

TEST_CASE("history CSV: pinned header, unset budget prints as inf") {
    std::vector<GenerationStats> history(2);
    history[0].run = 1;
    history[0].generation = 1;
    history[0].best_fitness = 9;
    history[0].mean_fitness = 4.5;
    history[0].best_total_steps = kUnlimitedSteps;
    history[0].solved_count = 0;
    history[1].run = 1;
    history[1].generation = 2;
    history[1].best_fitness = 0;
    history[1].mean_fitness = 2.25;
    history[1].best_total_steps = 12;
    history[1].solved_count = 3;

    CHECK(history_csv(history) ==
          "run,generation,best_fitness,mean_fitness,tau_b,solved_count\n"
          "1,1,9,4.5,inf,0\n"
          "1,2,0,2.25,12,3\n");
}
