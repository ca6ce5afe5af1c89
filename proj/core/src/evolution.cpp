#include "gpmrpp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace gpmrpp {

void GPConfig::validate() const {
    if (population_size < 1) throw std::invalid_argument("population_size must be positive");
    if (runs < 1) throw std::invalid_argument("runs must be positive");
    if (generations < 1) throw std::invalid_argument("generations must be positive");
    if (reproduction_rate < 0 || crossover_rate < 0 || mutation_rate < 0) {
        throw std::invalid_argument("operator rates must be non-negative");
    }
    const double sum = reproduction_rate + crossover_rate + mutation_rate;
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("operator rates must sum to 1");
    }
    if (init_max_depth < 1) throw std::invalid_argument("init_max_depth must be at least 1");
    if (max_depth < init_max_depth) {
        throw std::invalid_argument("max_depth must be at least init_max_depth");
    }
    if (comm_radius < 0) throw std::invalid_argument("comm_radius must be non-negative");
}

EvaluationResult compute_fitness(const Program& program,
                                 std::span<const ProblemInstance> examples,
                                 std::int64_t step_budget, int comm_radius) {
    EvaluationResult result;
    result.all_solved = true;
    result.per_example_steps.reserve(examples.size());

    for (const auto& example : examples) {
        std::int64_t cap = episode_step_cap(example.workspace.node_count(),
                                            static_cast<int>(example.robots.size()));
        if (step_budget != kUnlimitedSteps) {
            cap = std::min(cap, std::max<std::int64_t>(0, step_budget - result.total_steps));
        }
        const EpisodeResult episode = run_episode(example, program, cap, comm_radius);
        result.per_example_steps.push_back(episode.steps_used);
        result.total_steps += episode.steps_used;
        if (!episode.solved) {
            result.all_solved = false;
            for (std::size_t j = 0; j < example.robots.size(); ++j) {
                const std::int64_t d = example.workspace.distance(episode.final_positions[j],
                                                                  example.robots[j].goal);
                result.fitness += d * d;
            }
        }
    }
    return result;
}

std::vector<double> selection_weights(std::span<const std::int64_t> fitnesses) {
    if (fitnesses.empty()) {
        throw std::invalid_argument("selection_weights needs at least one fitness");
    }
    std::vector<double> weights(fitnesses.size());
    double total = 0.0;
    for (std::size_t i = 0; i < fitnesses.size(); ++i) {
        weights[i] = 1.0 / (1.0 + static_cast<double>(fitnesses[i]));
        total += weights[i];
    }
    for (auto& w : weights) w /= total;
    return weights;
}

namespace {

/// Cumulative-sum sampler over selection weights.
class WeightedPicker {
public:
    explicit WeightedPicker(std::span<const double> weights) {
        cumulative_.reserve(weights.size());
        double acc = 0.0;
        for (const double w : weights) {
            acc += w;
            cumulative_.push_back(acc);
        }
    }

    std::size_t pick(Rng& rng) const {
        const double u = rng.uniform01() * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
};

std::span<const ProgramNode> subtree_of(const Program& p, int index) {
    return std::span<const ProgramNode>(p.nodes()).subspan(index, p.nodes()[index].subtree_size);
}

/// Parent's nodes with the subtree at `index` replaced by `fragment`.
std::vector<ProgramNode> splice(const Program& parent, int index,
                                std::span<const ProgramNode> fragment) {
    const auto& nodes = parent.nodes();
    const int removed = nodes[index].subtree_size;
    std::vector<ProgramNode> out;
    out.reserve(nodes.size() - removed + fragment.size());
    out.insert(out.end(), nodes.begin(), nodes.begin() + index);
    out.insert(out.end(), fragment.begin(), fragment.end());
    out.insert(out.end(), nodes.begin() + index + removed, nodes.end());
    return out;
}

bool valid_offspring(const std::vector<ProgramNode>& nodes, int max_depth) {
    if (!nodes.front().is_function) return false;
    const int depth = fragment_depth(nodes);
    return depth >= 1 && depth <= max_depth;
}

}  // namespace

std::vector<Program> asexual_reproduction(std::span<const Program> population,
                                          std::span<const double> weights, int count,
                                          Rng& rng) {
    const WeightedPicker picker(weights);
    std::vector<Program> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        out.push_back(population[picker.pick(rng)]);
    }
    return out;
}

std::pair<Program, Program> crossover(const Program& a, const Program& b, int max_depth,
                                      Rng& rng) {
    for (int attempt = 0; attempt < 10; ++attempt) {
        const int i = static_cast<int>(rng.uniform_int(0, static_cast<int>(a.size()) - 1));
        const int j = static_cast<int>(rng.uniform_int(0, static_cast<int>(b.size()) - 1));
        auto first = splice(a, i, subtree_of(b, j));
        auto second = splice(b, j, subtree_of(a, i));
        if (valid_offspring(first, max_depth) && valid_offspring(second, max_depth)) {
            return {Program::from_nodes(std::move(first)), Program::from_nodes(std::move(second))};
        }
    }
    return {a, b};
}

Program mutate(const Program& parent, int subtree_max_depth, int max_depth, Rng& rng) {
    for (int attempt = 0; attempt < 10; ++attempt) {
        const int point =
            static_cast<int>(rng.uniform_int(0, static_cast<int>(parent.size()) - 1));
        const auto fragment = random_subtree(subtree_max_depth, point == 0, rng);
        auto candidate = splice(parent, point, fragment);
        if (valid_offspring(candidate, max_depth)) {
            return Program::from_nodes(std::move(candidate));
        }
    }
    return parent;
}

namespace {

void evaluate_population(const std::vector<Program>& population,
                         std::span<const ProblemInstance> examples, std::int64_t budget,
                         int comm_radius, int threads,
                         std::vector<EvaluationResult>& results) {
    results.resize(population.size());
    const int worker_count =
        std::max(1, std::min<int>(threads, static_cast<int>(population.size())));
    if (worker_count == 1) {
        for (std::size_t k = 0; k < population.size(); ++k) {
            results[k] = compute_fitness(population[k], examples, budget, comm_radius);
        }
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (int w = 0; w < worker_count; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t k = w; k < population.size(); k += worker_count) {
                results[k] = compute_fitness(population[k], examples, budget, comm_radius);
            }
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace

EvolveResult evolve(const GPConfig& config, std::span<const ProblemInstance> examples,
                    Rng& rng, const EvolveOptions& options) {
    config.validate();
    if (examples.empty()) {
        throw std::invalid_argument("evolve needs at least one example");
    }

    EvolveResult result;
    result.history.reserve(static_cast<std::size_t>(config.runs) * config.generations);

    const int pop_size = config.population_size;
    std::vector<Program> population;
    std::vector<Program> next;
    std::vector<EvaluationResult> evals;
    std::vector<std::int64_t> fitnesses(pop_size);

    for (int run = 1; run <= config.runs; ++run) {
        population.clear();
        population.reserve(pop_size);
        for (int k = 0; k < pop_size; ++k) {
            population.push_back(random_program(config.init_max_depth, rng));
        }

        for (int gen = 1; gen <= config.generations; ++gen) {
            const std::int64_t budget = result.best_total_steps;
            evaluate_population(population, examples, budget, config.comm_radius,
                                options.threads, evals);

            GenerationStats stats;
            stats.run = run;
            stats.generation = gen;
            stats.population_size = pop_size;
            stats.best_fitness = evals[0].fitness;
            std::int64_t fitness_sum = 0;
            for (int k = 0; k < pop_size; ++k) {
                const auto& ev = evals[k];
                fitnesses[k] = ev.fitness;
                fitness_sum += ev.fitness;
                stats.best_fitness = std::min(stats.best_fitness, ev.fitness);
                if (ev.fitness == 0) ++stats.solved_count;
                if (ev.all_solved && ev.total_steps < result.best_total_steps) {
                    result.best_total_steps = ev.total_steps;
                    result.best = population[k];
                }
                if (ev.fitness < result.best_effort_fitness) {
                    result.best_effort_fitness = ev.fitness;
                    result.best_effort = population[k];
                }
            }
            stats.mean_fitness = static_cast<double>(fitness_sum) / pop_size;
            stats.best_total_steps = result.best_total_steps;
            result.history.push_back(stats);
            if (options.observer) {
                options.observer(GenerationView{population, evals, result.history.back()});
            }

            const auto weights = selection_weights(fitnesses);
            const WeightedPicker picker(weights);

            int n_crossover = static_cast<int>(std::llround(config.crossover_rate * pop_size));
            int n_mutation = static_cast<int>(std::llround(config.mutation_rate * pop_size));
            int n_copy = pop_size - n_crossover - n_mutation;   // rounding residue lands here
            if (n_copy < 0) {
                n_mutation += n_copy;
                n_copy = 0;
            }

            next.clear();
            next.reserve(pop_size);
            for (int i = 0; i < n_copy; ++i) {
                next.push_back(population[picker.pick(rng)]);
            }
            for (int produced = 0; produced < n_crossover; produced += 2) {
                const auto& pa = population[picker.pick(rng)];
                const auto& pb = population[picker.pick(rng)];
                auto [first, second] = crossover(pa, pb, config.max_depth, rng);
                if (produced + 1 < n_crossover) {
                    next.push_back(std::move(first));
                    next.push_back(std::move(second));
                } else {
                    // odd offspring count: a coin decides which one survives
                    next.push_back(rng.uniform_int(0, 1) == 0 ? std::move(first)
                                                              : std::move(second));
                }
            }
            for (int i = 0; i < n_mutation; ++i) {
                next.push_back(
                    mutate(population[picker.pick(rng)], config.init_max_depth,
                           config.max_depth, rng));
            }
            population.swap(next);
        }
    }
    return result;
}

}  // namespace gpmrpp
