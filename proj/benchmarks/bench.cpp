// Microbenchmarks for the hot paths: tree generation, path queries,
// condition evaluation, simulation stepping and fitness evaluation.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "gpmrpp/evolution.hpp"
#include "gpmrpp/program.hpp"
#include "gpmrpp/rng.hpp"
#include "gpmrpp/simulator.hpp"
#include "gpmrpp/workspace.hpp"

using namespace gpmrpp;

static ProblemInstance make_problem(int seed_depth, std::uint64_t seed) {
    Rng rng(seed);
    GeneratorParams params;
    params.seed_depth = seed_depth;
    params.max_branching = 4;
    return generate_instance(params, rng);
}

static void BM_GenerateWorkspace(benchmark::State& state) {
    Rng rng(1);
    GeneratorParams params;
    params.seed_depth = static_cast<int>(state.range(0));
    params.max_branching = 4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_mst(params, rng));
    }
}
BENCHMARK(BM_GenerateWorkspace)->Arg(3)->Arg(5)->Arg(7);

static void BM_PathQuery(benchmark::State& state) {
    Rng rng(2);
    GeneratorParams params;
    params.seed_depth = 6;
    params.max_branching = 4;
    const Workspace ws = generate_mst(params, rng);
    const NodeId last = ws.node_count() - 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ws.path_between(0, last));
    }
}
BENCHMARK(BM_PathQuery);

static void BM_ConditionEval(benchmark::State& state) {
    const ProblemInstance problem = make_problem(4, 3);
    SimulationState sim(problem);
    for (auto _ : state) {
        for (int c = 0; c < kFunctionCount; ++c) {
            benchmark::DoNotOptimize(
                sim.eval_condition(0, static_cast<FunctionKind>(c)));
        }
    }
}
BENCHMARK(BM_ConditionEval);

static void BM_SimulationStep(benchmark::State& state) {
    const ProblemInstance problem = make_problem(4, 4);
    Rng rng(5);
    const Program program = random_program(4, rng);
    SimulationState sim(problem);
    for (auto _ : state) {
        sim.step(program);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(problem.robots.size()));
}
BENCHMARK(BM_SimulationStep);

static void BM_ComputeFitness(benchmark::State& state) {
    const ProblemInstance problem = make_problem(static_cast<int>(state.range(0)), 6);
    Rng rng(7);
    const Program program = random_program(4, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_fitness(program, {&problem, 1}));
    }
}
BENCHMARK(BM_ComputeFitness)->Arg(3)->Arg(5);

BENCHMARK_MAIN();
