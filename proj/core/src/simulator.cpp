#include "gpmrpp/simulator.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace gpmrpp {

SimulationState::SimulationState(const ProblemInstance& problem, int comm_radius)
    : problem_(&problem), comm_radius_(comm_radius) {
    if (comm_radius < 0) {
        throw std::invalid_argument("comm_radius must be non-negative");
    }
    validate_problem(problem);

    const int n = workspace().node_count();
    occupancy_.assign(n, -1);
    robots_.reserve(problem.robots.size());
    for (const auto& spec : problem.robots) {
        RobotState r;
        r.id = spec.id;
        r.position = spec.start;
        r.goal = spec.goal;
        r.visited.assign(n, 0);
        r.visited[spec.start] = 1;
        r.visited_count = 1;
        r.has_visited_goal = (spec.start == spec.goal);
        if (r.has_visited_goal) ++solved_count_;
        occupancy_[spec.start] = spec.id;
        robots_.push_back(std::move(r));
    }
    visited_total_ = static_cast<std::int64_t>(robots_.size());
    paths_.assign(robots_.size(), {});
    path_valid_.assign(robots_.size(), 0);
    bfs_mark_.assign(n, 0);
}

std::optional<int> SimulationState::occupant(NodeId node) const {
    if (occupancy_[node] < 0) return std::nullopt;
    return occupancy_[node];
}

std::vector<NodeId> SimulationState::positions() const {
    std::vector<NodeId> out;
    out.reserve(robots_.size());
    for (const auto& r : robots_) out.push_back(r.position);
    return out;
}

const std::vector<NodeId>& SimulationState::current_path(int robot_id) {
    if (!path_valid_[robot_id]) {
        const auto& r = robots_[robot_id];
        workspace().path_between(r.position, r.branch_target.value_or(r.goal), paths_[robot_id]);
        path_valid_[robot_id] = 1;
    }
    return paths_[robot_id];
}

std::vector<int> SimulationState::comm_network(int robot_id) const {
    // BFS truncated at comm_radius; stamps avoid clearing marks per call.
    std::vector<int> ids;
    const int stamp = ++bfs_stamp_;
    bfs_queue_.clear();
    bfs_queue_.push_back(robots_[robot_id].position);
    bfs_mark_[robots_[robot_id].position] = stamp;
    std::size_t head = 0;
    std::size_t layer_end = 1;
    for (int dist = 0; dist < comm_radius_ && head < bfs_queue_.size(); ++dist) {
        for (; head < layer_end; ++head) {
            for (const NodeId next : workspace().neighbors(bfs_queue_[head])) {
                if (bfs_mark_[next] != stamp) {
                    bfs_mark_[next] = stamp;
                    bfs_queue_.push_back(next);
                    if (occupancy_[next] >= 0 && occupancy_[next] != robot_id) {
                        ids.push_back(occupancy_[next]);
                    }
                }
            }
        }
        layer_end = bfs_queue_.size();
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

bool SimulationState::on_path_of(int robot_id, NodeId node) {
    const auto& path = current_path(robot_id);
    return std::find(path.begin(), path.end(), node) != path.end();
}

void SimulationState::set_branch_target(int robot_id, NodeId target) {
    auto& r = robots_[robot_id];
    if (r.branch_target != target) {
        r.branch_target = target;
        path_valid_[robot_id] = 0;
        step_changed_ = true;
    }
}

bool SimulationState::eval_condition(int robot_id, FunctionKind kind) {
    auto& self = robots_[robot_id];
    switch (kind) {
        case FunctionKind::kTwoRobotsOnEachOthersPath: {
            for (const int other : comm_network(robot_id)) {
                if (on_path_of(other, self.position) &&
                    on_path_of(robot_id, robots_[other].position)) {
                    const auto branch = workspace().nearest_branch(self.position);
                    if (!branch) return false;
                    set_branch_target(robot_id, *branch);
                    set_branch_target(other, *branch);
                    return true;
                }
            }
            return false;
        }
        case FunctionKind::kNeighborIsSurrounded: {
            for (const NodeId nb : workspace().neighbors(self.position)) {
                if (occupancy_[nb] < 0) continue;
                const auto their_neighbors = workspace().neighbors(nb);
                const bool surrounded =
                    std::all_of(their_neighbors.begin(), their_neighbors.end(),
                                [this](NodeId n) { return occupancy_[n] >= 0; });
                if (surrounded) return true;
            }
            return false;
        }
        case FunctionKind::kRobotAtBranch:
            return self.branch_target && self.position == *self.branch_target;
        case FunctionKind::kRobotAtDestination:
            return self.position == self.goal;
        case FunctionKind::kRobotMovingToBranch:
            return self.branch_target && self.position != *self.branch_target;
        case FunctionKind::kNeighborOnPathIsFree: {
            const auto& path = current_path(robot_id);
            return !path.empty() && occupancy_[path.front()] < 0;
        }
        case FunctionKind::kRobotIsSolved:
            return self.has_visited_goal;
        case FunctionKind::kOnPathOfRobotInNetwork: {
            for (const int other : comm_network(robot_id)) {
                if (on_path_of(other, self.position)) return true;
            }
            return false;
        }
        case FunctionKind::kRobotInNetworkMovingToBranch: {
            for (const int other : comm_network(robot_id)) {
                const auto& r = robots_[other];
                if (r.branch_target && r.position != *r.branch_target) return true;
            }
            return false;
        }
    }
    return false;
}

void SimulationState::move_robot(RobotState& robot, NodeId to) {
    const NodeId from = robot.position;
    edges_used_.emplace_back(std::min(from, to), std::max(from, to));
    occupancy_[from] = -1;
    occupancy_[to] = robot.id;
    if (robot.branch_target && from == *robot.branch_target) {
        robot.branch_target.reset();   // stepped off the branch it was holding
    }
    robot.position = to;
    if (!robot.visited[to]) {
        robot.visited[to] = 1;
        ++robot.visited_count;
        ++visited_total_;
    }
    if (to == robot.goal && !robot.has_visited_goal) {
        robot.has_visited_goal = true;
        ++solved_count_;
    }
    path_valid_[robot.id] = 0;
    step_changed_ = true;
}

NodeId SimulationState::apply_terminal(int robot_id, TerminalKind kind) {
    auto& self = robots_[robot_id];
    ++terminals_executed_;

    NodeId candidate = -1;
    switch (kind) {
        case TerminalKind::kMoveTowardBranch:
            if (self.branch_target && self.position != *self.branch_target) {
                candidate = current_path(robot_id).front();
            }
            break;
        case TerminalKind::kMoveToFreeNeighbor:
            for (const NodeId nb : workspace().neighbors(self.position)) {
                if (occupancy_[nb] < 0 && !self.visited[nb]) {
                    candidate = nb;   // neighbors are ascending, first hit wins
                    break;
                }
            }
            break;
        case TerminalKind::kMoveTowardObjective: {
            const auto& path = current_path(robot_id);
            if (!path.empty()) candidate = path.front();
            break;
        }
        case TerminalKind::kStay:
            break;
    }

    if (candidate < 0 || occupancy_[candidate] >= 0) {
        return self.position;
    }
    const std::pair<NodeId, NodeId> edge{std::min(self.position, candidate),
                                         std::max(self.position, candidate)};
    if (std::find(edges_used_.begin(), edges_used_.end(), edge) != edges_used_.end()) {
        return self.position;
    }
    move_robot(self, candidate);
    return self.position;
}

void SimulationState::step(const Program& program) {
    edges_used_.clear();
    step_changed_ = false;
    const auto& nodes = program.nodes();
    for (int id = 0; id < robot_count(); ++id) {
        int index = 0;
        while (nodes[index].is_function) {
            const bool taken = eval_condition(id, static_cast<FunctionKind>(nodes[index].kind));
            const int left = index + 1;
            index = taken ? left : left + nodes[left].subtree_size;
        }
        apply_terminal(id, static_cast<TerminalKind>(nodes[index].kind));
    }
    ++clock_;
}

void SimulationState::save_snapshot(Snapshot& out) const {
    out.positions.clear();
    out.branch_targets.clear();
    out.solved_flags.clear();
    for (const auto& r : robots_) {
        out.positions.push_back(r.position);
        out.branch_targets.push_back(r.branch_target.value_or(-1));
        out.solved_flags.push_back(r.has_visited_goal ? 1 : 0);
    }
    out.visited_total = visited_total_;
}

bool SimulationState::matches_snapshot(const Snapshot& snapshot) const {
    if (snapshot.visited_total != visited_total_) return false;
    for (std::size_t i = 0; i < robots_.size(); ++i) {
        const auto& r = robots_[i];
        if (snapshot.positions[i] != r.position) return false;
        if (snapshot.branch_targets[i] != r.branch_target.value_or(-1)) return false;
        if ((snapshot.solved_flags[i] != 0) != r.has_visited_goal) return false;
    }
    return true;
}

namespace {

void emit_trace(std::ostream& out, const SimulationState& state) {
    out << "t=" << state.clock();
    for (const auto& r : state.robots()) {
        out << " robot " << r.id << " " << r.position;
    }
    out << "\n";
}

}  // namespace

EpisodeResult run_episode(const ProblemInstance& problem, const Program& program,
                          const EpisodeOptions& options) {
    if (options.step_cap < 0) {
        throw std::invalid_argument("step_cap must be non-negative");
    }
    SimulationState state(problem, options.comm_radius);
    if (state.all_solved()) {
        return {true, 0, state.positions()};
    }

    const bool detect = options.detect_cycles && options.trace == nullptr;
    SimulationState::Snapshot checkpoint;
    std::int64_t checkpoint_clock = 0;
    std::int64_t next_checkpoint_gap = 1;
    if (detect) state.save_snapshot(checkpoint);

    while (state.clock() < options.step_cap) {
        state.step(program);
        if (options.trace) emit_trace(*options.trace, state);
        if (state.all_solved()) {
            return {true, state.clock(), state.positions()};
        }
        if (!detect) continue;

        if (!state.last_step_changed()) {
            // Fixed point: every later state equals this one.
            return {false, options.step_cap, state.positions()};
        }
        if (state.matches_snapshot(checkpoint)) {
            // Cycle found; advance to the phase step_cap would land on.
            const std::int64_t period = state.clock() - checkpoint_clock;
            const std::int64_t phase = (options.step_cap - checkpoint_clock) % period;
            for (std::int64_t i = 0; i < phase; ++i) state.step(program);
            return {false, options.step_cap, state.positions()};
        }
        if (state.clock() - checkpoint_clock == next_checkpoint_gap) {
            state.save_snapshot(checkpoint);
            checkpoint_clock = state.clock();
            next_checkpoint_gap *= 2;
        }
    }
    return {false, options.step_cap, state.positions()};
}

EpisodeResult run_episode(const ProblemInstance& problem, const Program& program,
                          std::int64_t step_cap, int comm_radius) {
    EpisodeOptions options;
    options.step_cap = step_cap;
    options.comm_radius = comm_radius;
    return run_episode(problem, program, options);
}

std::int64_t episode_step_cap(int node_count, int robot_count) {
    const auto n = static_cast<std::int64_t>(node_count);
    const auto r = static_cast<std::int64_t>(robot_count);
    return n * n * r * r;
}

}  // namespace gpmrpp
