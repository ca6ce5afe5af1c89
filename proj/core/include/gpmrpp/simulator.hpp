#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gpmrpp/program.hpp"
#include "gpmrpp/workspace.hpp"

namespace gpmrpp {

struct RobotState {
    int id = 0;
    NodeId position = 0;
    NodeId goal = 0;
    std::optional<NodeId> branch_target;
    bool has_visited_goal = false;

    std::vector<std::uint8_t> visited;   // by node id; accumulates for the whole episode
    int visited_count = 0;
};

/// World state driven by one navigation program.  Robots act one at a
/// time in ascending id order within a step, so later robots see the
/// moves earlier ones already made.
class SimulationState {
public:
    explicit SimulationState(const ProblemInstance& problem, int comm_radius = 2);

    /// One world step: for each robot in ascending id order, walk the
    /// program from the root to exactly one terminal and apply it.
    void step(const Program& program);

    /// Conditional evaluation for one robot.  TwoRobotsOnEachOthersPath
    /// may retarget both involved robots toward the branch node nearest
    /// the querying robot (no branch node: false, no side effect).
    bool eval_condition(int robot_id, FunctionKind kind);

    /// Executes a movement action and returns the robot's (possibly
    /// unchanged) position.  A robot stays put when the action yields no
    /// candidate, the candidate is occupied, or the connecting edge was
    /// already used this step.
    NodeId apply_terminal(int robot_id, TerminalKind kind);

    /// Ids of robots within comm_radius tree distance, self excluded,
    /// ascending.
    std::vector<int> comm_network(int robot_id) const;

    /// Remaining nodes of the robot's current route: toward its branch
    /// target when one is set, else toward its goal.  Empty on arrival.
    const std::vector<NodeId>& current_path(int robot_id);

    const ProblemInstance& problem() const { return *problem_; }
    const Workspace& workspace() const { return problem_->workspace; }
    std::span<const RobotState> robots() const { return robots_; }
    int robot_count() const { return static_cast<int>(robots_.size()); }
    std::int64_t clock() const { return clock_; }
    int comm_radius() const { return comm_radius_; }
    bool all_solved() const { return solved_count_ == robot_count(); }
    std::optional<int> occupant(NodeId node) const;
    const std::vector<std::pair<NodeId, NodeId>>& edges_used_this_step() const {
        return edges_used_;
    }
    std::vector<NodeId> positions() const;

    /// Terminals executed so far; exactly one per robot per step.
    std::uint64_t terminals_executed() const { return terminals_executed_; }

    /// False when the previous step left every robot, branch target and
    /// visited set untouched (the state is a fixed point).
    bool last_step_changed() const { return step_changed_; }

    /// Compact copy of everything the dynamics depend on.  Visited sets
    /// only ever grow, so their total size stands in for their content.
    struct Snapshot {
        std::vector<NodeId> positions;
        std::vector<NodeId> branch_targets;   // -1 = unset
        std::vector<std::uint8_t> solved_flags;
        std::int64_t visited_total = 0;
    };
    void save_snapshot(Snapshot& out) const;
    bool matches_snapshot(const Snapshot& snapshot) const;

private:
    bool on_path_of(int robot_id, NodeId node);
    void set_branch_target(int robot_id, NodeId target);
    void move_robot(RobotState& robot, NodeId to);

    const ProblemInstance* problem_;
    int comm_radius_;
    std::vector<RobotState> robots_;
    std::vector<int> occupancy_;                        // node -> robot id or -1
    std::vector<std::pair<NodeId, NodeId>> edges_used_; // normalized u < v
    std::int64_t clock_ = 0;
    int solved_count_ = 0;
    std::int64_t visited_total_ = 0;
    std::uint64_t terminals_executed_ = 0;
    bool step_changed_ = false;

    // per-robot cached route, rebuilt lazily after moves and retargets
    std::vector<std::vector<NodeId>> paths_;
    std::vector<std::uint8_t> path_valid_;

    // scratch for the truncated BFS behind comm_network
    mutable std::vector<int> bfs_mark_;
    mutable std::vector<NodeId> bfs_queue_;
    mutable int bfs_stamp_ = 0;
};

struct EpisodeResult {
    bool solved = false;
    std::int64_t steps_used = 0;
    std::vector<NodeId> final_positions;
};

struct EpisodeOptions {
    std::int64_t step_cap = 0;
    int comm_radius = 2;
    /// Cut episodes short once the state provably repeats, then align to
    /// the phase the state would have at step_cap; results are identical
    /// to running the cap out.  Ignored while tracing.
    bool detect_cycles = true;
    std::ostream* trace = nullptr;   // one line per step: t=<n> robot <id> <node> ...
};

/// Runs until every robot has visited its goal or step_cap is reached.
/// steps_used is the solving step or step_cap; final positions are
/// reported either way.  Robots that pass through their goal count as
/// solved from that moment even if they move on.
EpisodeResult run_episode(const ProblemInstance& problem, const Program& program,
                          const EpisodeOptions& options);
EpisodeResult run_episode(const ProblemInstance& problem, const Program& program,
                          std::int64_t step_cap, int comm_radius = 2);

/// Per-example step allowance: node_count^2 * robot_count^2.
std::int64_t episode_step_cap(int node_count, int robot_count);

}  // namespace gpmrpp
