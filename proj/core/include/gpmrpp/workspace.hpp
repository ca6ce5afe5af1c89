#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gpmrpp/rng.hpp"

namespace gpmrpp {

using NodeId = int;

/// Undirected tree of single-lane corridors.  Nodes are 0..node_count-1.
/// Immutable after construction and safe to share between threads.
class Workspace {
public:
    /// Validates that (node_count, edges) form a tree: exactly
    /// node_count - 1 edges, all endpoints in range, connected, no
    /// duplicates.  Throws std::invalid_argument otherwise.
    Workspace(int node_count, std::vector<std::pair<NodeId, NodeId>> edges);

    int node_count() const { return node_count_; }

    /// Edges normalized to u < v, sorted ascending.
    const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }

    std::span<const NodeId> neighbors(NodeId n) const { return adjacency_[n]; }
    int degree(NodeId n) const { return static_cast<int>(adjacency_[n].size()); }

    /// Nodes with degree >= 3, ascending.
    const std::vector<NodeId>& branch_nodes() const { return branch_nodes_; }

    /// Nodes with degree 1, ascending (empty for a single-node workspace).
    const std::vector<NodeId>& leaf_nodes() const { return leaf_nodes_; }

    /// Unique simple path from `from` to `to`: starts one step after
    /// `from`, ends at and includes `to`.  Empty when from == to.
    std::vector<NodeId> path_between(NodeId from, NodeId to) const;
    void path_between(NodeId from, NodeId to, std::vector<NodeId>& out) const;

    /// Edge count of the unique path between a and b.
    int distance(NodeId a, NodeId b) const;

    /// Branch node closest to `from` (ties broken by lowest node id);
    /// nullopt when the workspace has no branch node.  A branch node is
    /// its own nearest branch at distance 0.
    std::optional<NodeId> nearest_branch(NodeId from) const;

private:
    int node_count_;
    std::vector<std::pair<NodeId, NodeId>> edges_;
    std::vector<std::vector<NodeId>> adjacency_;   // each list sorted
    std::vector<NodeId> branch_nodes_;
    std::vector<NodeId> leaf_nodes_;
    std::vector<NodeId> parent_;                   // rooted at node 0
    std::vector<int> depth_;
    std::vector<NodeId> nearest_branch_;           // -1 when none exists
};

struct RobotSpec {
    int id = 0;
    NodeId start = 0;
    NodeId goal = 0;
};

/// A workspace plus the robots that populate it.
struct ProblemInstance {
    Workspace workspace;
    std::vector<RobotSpec> robots;   // ids 0..k-1 ascending
    std::string label;
};

/// Throws std::invalid_argument when robot ids are not 0..k-1, starts or
/// goals collide or fall outside the workspace, or more than
/// node_count - 2 robots are present.
void validate_problem(const ProblemInstance& problem);

enum class RobotCountRule {
    kLeavesMinusOne,    // |R| = leaf_count - 1
    kLeafMultiplier,    // |R| = floor(multiplier * leaf_count)
    kExplicit,          // |R| = explicit_count
};

struct GeneratorParams {
    int seed_depth = 4;        // recursion budget of the tree generator
    int max_branching = 4;     // children per node drawn uniformly from 0..max_branching
    RobotCountRule robot_count_rule = RobotCountRule::kLeavesMinusOne;
    double leaf_multiplier = 1.0;
    int explicit_count = 1;
};

/// Recursive random tree: each node draws a child count uniformly from
/// 0..max_branching and recurses with seed_depth - 1; a node with
/// seed_depth 0 stops.  Node ids follow creation order (root = 0,
/// children numbered depth-first).
Workspace generate_mst(const GeneratorParams& params, Rng& rng);

/// Robot count after the rule's floor at 1 and clamp to node_count - 2.
/// Meaningless for workspaces with fewer than 3 nodes.
int robot_count_for_rule(const GeneratorParams& params, int leaf_count, int node_count);

/// Distinct random starts and, independently, distinct random goals.
/// Throws std::invalid_argument when robot_count > node_count - 2.
ProblemInstance build_problem(const Workspace& workspace, int robot_count, Rng& rng,
                              std::string label = {});

/// generate_mst + build_problem, regenerating (fresh draws) until the
/// tree admits the requested robot count: at least 3 nodes and, for
/// kExplicit, node_count >= explicit_count + 2.  Throws when the rule can
/// never be satisfied at this seed_depth/max_branching.
ProblemInstance generate_instance(const GeneratorParams& params, Rng& rng,
                                  std::string label = {});

/// Three fixed two-lane-conflict fixtures:
///   swap-1  two robots heading through each other on a chain with a spur
///   swap-2  a robot and its goal both sitting on another robot's route
///   swap-3  a robot boxed in on a branch node, every neighbor occupied
/// Each workspace has at least one branch node, so the conflicts are
/// resolvable in principle.
std::vector<ProblemInstance> canonical_scenarios();

}  // namespace gpmrpp
