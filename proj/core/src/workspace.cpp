#include "gpmrpp/workspace.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

namespace gpmrpp {

Workspace::Workspace(int node_count, std::vector<std::pair<NodeId, NodeId>> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
    if (node_count_ < 1) {
        throw std::invalid_argument("workspace needs at least one node");
    }
    if (edges_.size() != static_cast<std::size_t>(node_count_ - 1)) {
        throw std::invalid_argument("a tree on " + std::to_string(node_count_) +
                                    " nodes needs exactly " + std::to_string(node_count_ - 1) +
                                    " edges, got " + std::to_string(edges_.size()));
    }
    for (auto& [u, v] : edges_) {
        if (u < 0 || u >= node_count_ || v < 0 || v >= node_count_) {
            throw std::invalid_argument("edge endpoint out of range");
        }
        if (u == v) {
            throw std::invalid_argument("self-loop edge");
        }
        if (u > v) std::swap(u, v);
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw std::invalid_argument("duplicate edge");
    }

    adjacency_.assign(node_count_, {});
    for (const auto& [u, v] : edges_) {
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
    }
    for (auto& list : adjacency_) {
        std::sort(list.begin(), list.end());
    }

    // Root at node 0; BFS doubles as the connectivity check.
    parent_.assign(node_count_, -1);
    depth_.assign(node_count_, -1);
    depth_[0] = 0;
    std::deque<NodeId> queue{0};
    int seen = 0;
    while (!queue.empty()) {
        const NodeId n = queue.front();
        queue.pop_front();
        ++seen;
        for (const NodeId next : adjacency_[n]) {
            if (depth_[next] < 0) {
                depth_[next] = depth_[n] + 1;
                parent_[next] = n;
                queue.push_back(next);
            }
        }
    }
    if (seen != node_count_) {
        throw std::invalid_argument("edges do not connect all nodes");
    }

    for (NodeId n = 0; n < node_count_; ++n) {
        if (degree(n) >= 3) branch_nodes_.push_back(n);
        if (degree(n) == 1) leaf_nodes_.push_back(n);
    }

    // Multi-source BFS from all branch nodes.  A node first reached in
    // layer d+1 takes the smallest branch label offered by its layer-d
    // neighbors, which realizes the lowest-id tie-break exactly.
    nearest_branch_.assign(node_count_, -1);
    std::vector<int> branch_dist(node_count_, -1);
    std::vector<NodeId> frontier;
    std::vector<NodeId> next_frontier;
    for (const NodeId b : branch_nodes_) {
        nearest_branch_[b] = b;
        branch_dist[b] = 0;
        frontier.push_back(b);
    }
    for (int d = 0; !frontier.empty(); ++d) {
        next_frontier.clear();
        for (const NodeId n : frontier) {
            for (const NodeId nb : adjacency_[n]) {
                if (branch_dist[nb] < 0) {
                    branch_dist[nb] = d + 1;
                    nearest_branch_[nb] = nearest_branch_[n];
                    next_frontier.push_back(nb);
                } else if (branch_dist[nb] == d + 1 && nearest_branch_[n] < nearest_branch_[nb]) {
                    nearest_branch_[nb] = nearest_branch_[n];
                }
            }
        }
        frontier.swap(next_frontier);
    }
}

void Workspace::path_between(NodeId from, NodeId to, std::vector<NodeId>& out) const {
    out.clear();
    if (from == to) return;
    thread_local std::vector<NodeId> tail;
    tail.clear();
    NodeId a = from;
    NodeId b = to;
    while (depth_[a] > depth_[b]) {
        a = parent_[a];
        out.push_back(a);
    }
    while (depth_[b] > depth_[a]) {
        tail.push_back(b);
        b = parent_[b];
    }
    while (a != b) {
        a = parent_[a];
        out.push_back(a);
        tail.push_back(b);
        b = parent_[b];
    }
    out.insert(out.end(), tail.rbegin(), tail.rend());
}

std::vector<NodeId> Workspace::path_between(NodeId from, NodeId to) const {
    std::vector<NodeId> out;
    path_between(from, to, out);
    return out;
}

int Workspace::distance(NodeId a, NodeId b) const {
    const int da = depth_[a];
    const int db = depth_[b];
    NodeId x = a;
    NodeId y = b;
    while (depth_[x] > depth_[y]) x = parent_[x];
    while (depth_[y] > depth_[x]) y = parent_[y];
    while (x != y) {
        x = parent_[x];
        y = parent_[y];
    }
    return da + db - 2 * depth_[x];
}

std::optional<NodeId> Workspace::nearest_branch(NodeId from) const {
    if (nearest_branch_[from] < 0) return std::nullopt;
    return nearest_branch_[from];
}

void validate_problem(const ProblemInstance& problem) {
    const int n = problem.workspace.node_count();
    const auto& robots = problem.robots;
    if (robots.empty()) {
        throw std::invalid_argument("problem has no robots");
    }
    if (static_cast<int>(robots.size()) > n - 2) {
        throw std::invalid_argument("more than node_count - 2 robots");
    }
    for (std::size_t i = 0; i < robots.size(); ++i) {
        const auto& r = robots[i];
        if (r.id != static_cast<int>(i)) {
            throw std::invalid_argument("robot ids must be 0..k-1 in order");
        }
        if (r.start < 0 || r.start >= n || r.goal < 0 || r.goal >= n) {
            throw std::invalid_argument("robot start or goal out of range");
        }
    }
    for (std::size_t i = 0; i < robots.size(); ++i) {
        for (std::size_t j = i + 1; j < robots.size(); ++j) {
            if (robots[i].start == robots[j].start) {
                throw std::invalid_argument("two robots share a start node");
            }
            if (robots[i].goal == robots[j].goal) {
                throw std::invalid_argument("two robots share a goal node");
            }
        }
    }
}

namespace {

void grow_tree(int parent_depth_budget, int max_branching, Rng& rng, NodeId parent,
               int& next_id, std::vector<std::pair<NodeId, NodeId>>& edges) {
    if (parent_depth_budget <= 0) return;
    const auto children = rng.uniform_int(0, max_branching);
    for (std::int64_t i = 0; i < children; ++i) {
        const NodeId child = next_id++;
        grow_tree(parent_depth_budget - 1, max_branching, rng, child, next_id, edges);
        edges.emplace_back(parent, child);
    }
}

}  // namespace

Workspace generate_mst(const GeneratorParams& params, Rng& rng) {
    if (params.seed_depth < 0 || params.max_branching < 0) {
        throw std::invalid_argument("seed_depth and max_branching must be non-negative");
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    int next_id = 1;
    grow_tree(params.seed_depth, params.max_branching, rng, 0, next_id, edges);
    return Workspace(next_id, std::move(edges));
}

int robot_count_for_rule(const GeneratorParams& params, int leaf_count, int node_count) {
    int want = 0;
    switch (params.robot_count_rule) {
        case RobotCountRule::kLeavesMinusOne:
            want = leaf_count - 1;
            break;
        case RobotCountRule::kLeafMultiplier:
            want = static_cast<int>(params.leaf_multiplier * leaf_count);
            break;
        case RobotCountRule::kExplicit:
            want = params.explicit_count;
            break;
    }
    return std::max(1, std::min(want, node_count - 2));
}

ProblemInstance build_problem(const Workspace& workspace, int robot_count, Rng& rng,
                              std::string label) {
    const int n = workspace.node_count();
    if (robot_count < 1) {
        throw std::invalid_argument("robot_count must be positive");
    }
    if (robot_count > n - 2) {
        throw std::invalid_argument("robot_count " + std::to_string(robot_count) +
                                    " exceeds node_count - 2 = " + std::to_string(n - 2));
    }

    // Partial Fisher-Yates; one pass for starts, an independent one for goals.
    const auto sample_distinct = [n, &rng](int k) {
        std::vector<NodeId> pool(n);
        for (int i = 0; i < n; ++i) pool[i] = i;
        for (int i = 0; i < k; ++i) {
            const auto j = rng.uniform_int(i, n - 1);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    };
    const auto starts = sample_distinct(robot_count);
    const auto goals = sample_distinct(robot_count);

    ProblemInstance problem{workspace, {}, std::move(label)};
    problem.robots.reserve(robot_count);
    for (int i = 0; i < robot_count; ++i) {
        problem.robots.push_back({i, starts[i], goals[i]});
    }
    validate_problem(problem);
    return problem;
}

ProblemInstance generate_instance(const GeneratorParams& params, Rng& rng, std::string label) {
    if (params.robot_count_rule == RobotCountRule::kExplicit) {
        if (params.explicit_count < 1) {
            throw std::invalid_argument("explicit robot count must be positive");
        }
        // Largest tree this generator can emit: sum of max_branching^i.
        std::int64_t max_nodes = 0;
        std::int64_t layer = 1;
        for (int i = 0; i <= params.seed_depth; ++i) {
            max_nodes += layer;
            if (max_nodes > params.explicit_count + 2) break;
            layer *= std::max(1, params.max_branching);
        }
        if (max_nodes < params.explicit_count + 2) {
            throw std::invalid_argument("workspace can never fit " +
                                        std::to_string(params.explicit_count) + " robots");
        }
    }

    for (int attempt = 0; attempt < 100000; ++attempt) {
        Workspace ws = generate_mst(params, rng);
        const int n = ws.node_count();
        if (n < 3) continue;
        const int leaf_count = static_cast<int>(ws.leaf_nodes().size());
        if (params.robot_count_rule == RobotCountRule::kExplicit &&
            params.explicit_count > n - 2) {
            continue;
        }
        const int robots = robot_count_for_rule(params, leaf_count, n);
        return build_problem(ws, robots, rng, std::move(label));
    }
    throw std::runtime_error("failed to generate a usable workspace");
}

std::vector<ProblemInstance> canonical_scenarios() {
    //   swap-1 / swap-2 workspace:        swap-3 workspace:
    //
    //       4                                 4 --- 5
    //       |                                 |
    //   0---1---2---3                     0---1---2---3
    //
    // swap-1: A travels 0->3, B travels 2->0; they meet head on and one
    //         must pull into the spur at node 1.
    // swap-2: A travels 0->3, B travels 2->1; B and B's goal both sit on
    //         A's route, so B has to clear the corridor after arriving.
    // swap-3: B starts on branch node 1 with all three neighbors occupied
    //         and sits on A's route 0->2.
    std::vector<ProblemInstance> scenarios;

    Workspace chain_spur(5, {{0, 1}, {1, 2}, {2, 3}, {1, 4}});
    scenarios.push_back({chain_spur, {{0, 0, 3}, {1, 2, 0}}, "swap-1"});
    scenarios.push_back({chain_spur, {{0, 0, 3}, {1, 2, 1}}, "swap-2"});

    Workspace boxed(6, {{0, 1}, {1, 2}, {2, 3}, {1, 4}, {4, 5}});
    scenarios.push_back({boxed, {{0, 0, 2}, {1, 1, 0}, {2, 2, 3}, {3, 4, 5}}, "swap-3"});

    for (const auto& s : scenarios) validate_problem(s);
    return scenarios;
}

}  // namespace gpmrpp
