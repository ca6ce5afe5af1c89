#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gpmrpp/rng.hpp"

namespace gpmrpp {

/// Conditionals a navigation program can ask about the querying robot.
enum class FunctionKind : std::uint8_t {
    kTwoRobotsOnEachOthersPath,
    kNeighborIsSurrounded,
    kRobotAtBranch,
    kRobotAtDestination,
    kRobotMovingToBranch,
    kNeighborOnPathIsFree,
    kRobotIsSolved,
    kOnPathOfRobotInNetwork,
    kRobotInNetworkMovingToBranch,
};
inline constexpr int kFunctionCount = 9;

/// Movement actions at the leaves.
enum class TerminalKind : std::uint8_t {
    kMoveTowardBranch,
    kMoveToFreeNeighbor,
    kMoveTowardObjective,
    kStay,
};
inline constexpr int kTerminalCount = 4;

inline constexpr int kDefaultMaxDepth = 50;

std::string_view name_of(FunctionKind kind);
std::string_view name_of(TerminalKind kind);
std::optional<FunctionKind> function_from_name(std::string_view name);
std::optional<TerminalKind> terminal_from_name(std::string_view name);

struct ProgramNode {
    bool is_function = false;
    std::uint8_t kind = 0;           // FunctionKind or TerminalKind value
    std::int32_t subtree_size = 1;   // nodes in the subtree rooted here

    bool operator==(const ProgramNode& other) const {
        return is_function == other.is_function && kind == other.kind;
    }
};

/// Depth (edge count) of a preorder fragment rooted at its first node.
int fragment_depth(std::span<const ProgramNode> nodes);

/// A decision tree stored in preorder.  Every function node has exactly
/// two children (true branch first); the root is always a function, so
/// depth is at least 1.  Value type: copying a Program copies the tree.
class Program {
public:
    Program() = default;

    /// Recomputes subtree sizes and checks shape (function arity 2,
    /// function root, no trailing nodes).  Throws std::invalid_argument
    /// on malformed input.
    static Program from_nodes(std::vector<ProgramNode> nodes);

    const std::vector<ProgramNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    int depth() const { return fragment_depth(nodes_); }

    bool operator==(const Program& other) const { return nodes_ == other.nodes_; }

private:
    std::vector<ProgramNode> nodes_;
};

/// Grow-method generation: the root comes from the function set, interior
/// draws are uniform over functions and terminals, and at max_depth only
/// terminals are drawn.  Resulting depth is between 1 and max_depth.
Program random_program(int max_depth, Rng& rng);

/// Fragment used for subtree mutation; with function_root false the
/// top draw may itself be a terminal (a depth-0 fragment).
std::vector<ProgramNode> random_subtree(int max_depth, bool function_root, Rng& rng);

/// Canonical s-expression: functions as (name true-branch false-branch),
/// terminals as (name).
std::string serialize_program(const Program& program);

struct ProgramParseError : std::runtime_error {
    ProgramParseError(int line, int col, const std::string& why);
    int line;
    int col;
};

/// Inverse of serialize_program.  Accepts '#' comments and arbitrary
/// whitespace; rejects unknown names, arity violations and programs whose
/// depth falls outside [1, max_depth], reporting line and column.
Program parse_program(std::string_view text, int max_depth = kDefaultMaxDepth);

Program load_program_file(const std::string& path, int max_depth = kDefaultMaxDepth);
void save_program_file(const Program& program, const std::string& path,
                       const std::string& comment = {});

}  // namespace gpmrpp
