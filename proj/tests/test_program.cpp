#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpmrpp/program.hpp"

using namespace gpmrpp;

namespace {

ProgramNode fn(FunctionKind kind) {
    return {true, static_cast<std::uint8_t>(kind), 1};
}

ProgramNode term(TerminalKind kind) {
    return {false, static_cast<std::uint8_t>(kind), 1};
}

// (if-robot-at-destination (stay) (move-toward-objective))
Program tiny() {
    return Program::from_nodes({fn(FunctionKind::kRobotAtDestination),
                                term(TerminalKind::kStay),
                                term(TerminalKind::kMoveTowardObjective)});
}

}  // namespace

TEST_CASE("every node name round-trips through the lookup tables") {
    for (int i = 0; i < kFunctionCount; ++i) {
        auto kind = static_cast<FunctionKind>(i);
        auto back = function_from_name(name_of(kind));
        REQUIRE(back.has_value());
        CHECK(*back == kind);
        CHECK_FALSE(terminal_from_name(name_of(kind)).has_value());
    }
    for (int i = 0; i < kTerminalCount; ++i) {
        auto kind = static_cast<TerminalKind>(i);
        auto back = terminal_from_name(name_of(kind));
        REQUIRE(back.has_value());
        CHECK(*back == kind);
    }
    CHECK_FALSE(function_from_name("if-robot-is-happy").has_value());
    CHECK_FALSE(terminal_from_name("").has_value());
}

TEST_CASE("node names are the documented kebab-case vocabulary") {
    std::set<std::string> names;
    for (int i = 0; i < kFunctionCount; ++i) {
        names.insert(std::string(name_of(static_cast<FunctionKind>(i))));
    }
    CHECK(names.count("if-two-robots-on-each-others-path") == 1);
    CHECK(names.count("if-neighbor-is-surrounded") == 1);
    CHECK(names.count("if-robot-at-branch") == 1);
    CHECK(names.count("if-robot-at-destination") == 1);
    CHECK(names.count("if-robot-moving-to-branch") == 1);
    CHECK(names.count("if-neighbor-on-path-is-free") == 1);
    CHECK(names.count("if-robot-is-solved") == 1);
    CHECK(names.count("if-on-path-of-robot-in-network") == 1);
    CHECK(names.count("if-robot-in-network-moving-to-branch") == 1);
    CHECK(names.size() == 9);

    CHECK(name_of(TerminalKind::kMoveTowardBranch) == "move-toward-branch");
    CHECK(name_of(TerminalKind::kMoveToFreeNeighbor) == "move-to-free-neighbor");
    CHECK(name_of(TerminalKind::kMoveTowardObjective) == "move-toward-objective");
    CHECK(name_of(TerminalKind::kStay) == "stay");
}

TEST_CASE("from_nodes enforces shape") {
    CHECK_THROWS_AS(Program::from_nodes({}), std::invalid_argument);
    // terminal at the root
    CHECK_THROWS_AS(Program::from_nodes({term(TerminalKind::kStay)}), std::invalid_argument);
    // function missing a child
    CHECK_THROWS_AS(Program::from_nodes({fn(FunctionKind::kRobotAtBranch),
                                         term(TerminalKind::kStay)}),
                    std::invalid_argument);
    // trailing node after a complete tree
    CHECK_THROWS_AS(Program::from_nodes({fn(FunctionKind::kRobotAtBranch),
                                         term(TerminalKind::kStay),
                                         term(TerminalKind::kStay),
                                         term(TerminalKind::kStay)}),
                    std::invalid_argument);

    Program p = tiny();
    CHECK(p.size() == 3);
    CHECK(p.depth() == 1);
    CHECK(p.nodes()[0].subtree_size == 3);
    CHECK(p.nodes()[1].subtree_size == 1);
}

TEST_CASE("fragment_depth measures edges, not nodes") {
    std::vector<ProgramNode> leaf{term(TerminalKind::kStay)};
    CHECK(fragment_depth(leaf) == 0);

    CHECK(tiny().depth() == 1);

    // (f (f t t) t) has depth 2 down the left side
    std::vector<ProgramNode> nested{fn(FunctionKind::kRobotIsSolved),
                                    fn(FunctionKind::kRobotAtBranch),
                                    term(TerminalKind::kStay),
                                    term(TerminalKind::kStay),
                                    term(TerminalKind::kMoveTowardObjective)};
    CHECK(fragment_depth(nested) == 2);
}

TEST_CASE("random programs respect the depth window and start with a function") {
    Rng rng(42);
    for (int max_depth : {1, 2, 5, 12}) {
        for (int i = 0; i < 200; ++i) {
            Program p = random_program(max_depth, rng);
            CHECK(p.nodes()[0].is_function);
            CHECK(p.depth() >= 1);
            CHECK(p.depth() <= max_depth);
        }
    }

    // at max_depth 1 the only possible shape is one function over two terminals
    Rng rng1(7);
    for (int i = 0; i < 50; ++i) {
        Program p = random_program(1, rng1);
        CHECK(p.size() == 3);
        CHECK_FALSE(p.nodes()[1].is_function);
        CHECK_FALSE(p.nodes()[2].is_function);
    }
}

TEST_CASE("random generation is reproducible per stream") {
    Rng a(1234);
    Rng b(1234);
    for (int i = 0; i < 20; ++i) {
        CHECK(random_program(6, a) == random_program(6, b));
    }
}

TEST_CASE("random subtrees may be bare terminals unless rooted") {
    Rng rng(9);
    bool saw_terminal = false;
    for (int i = 0; i < 100; ++i) {
        auto nodes = random_subtree(2, false, rng);
        CHECK(fragment_depth(nodes) <= 2);
        saw_terminal = saw_terminal || !nodes[0].is_function;
    }
    CHECK(saw_terminal);

    for (int i = 0; i < 100; ++i) {
        auto nodes = random_subtree(2, true, rng);
        CHECK(nodes[0].is_function);
    }
}

TEST_CASE("serialize and parse are inverse") {
    CHECK(serialize_program(tiny()) ==
          "(if-robot-at-destination (stay) (move-toward-objective))");
    CHECK(parse_program(serialize_program(tiny())) == tiny());

    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        Program p = random_program(8, rng);
        Program back = parse_program(serialize_program(p));
        CHECK(back == p);
        CHECK(serialize_program(back) == serialize_program(p));
    }
}

TEST_CASE("parser tolerates whitespace and comments") {
    Program p = parse_program(
        "# navigation policy\n"
        "  (if-robot-at-destination\n"
        "     (stay)  # hold position\n"
        "     (move-toward-objective))\n");
    CHECK(p == tiny());
}

TEST_CASE("parser reports line and column of the first problem") {
    auto error_at = [](const std::string& text) -> std::pair<int, int> {
        try {
            parse_program(text);
        } catch (const ProgramParseError& e) {
            return {e.line, e.col};
        }
        return {-1, -1};
    };

    CHECK(error_at("(if-robot-at-destination (stay)\n  (walk-away))") ==
          std::pair<int, int>{2, 4});
    CHECK(error_at("(stay)").first == 1);                       // terminal at the root
    CHECK(error_at("(if-robot-at-branch (stay))").first == 1);  // missing child
    CHECK(error_at("").first == 1);
    CHECK(error_at("(if-robot-at-destination (stay) (stay)) junk").second > 1);
}

TEST_CASE("parser enforces the depth window") {
    // a left comb of depth 3: (f (f (f t t) t) t)
    std::string deep = "(if-robot-is-solved (if-robot-is-solved (if-robot-is-solved "
                       "(stay) (stay)) (stay)) (stay))";
    CHECK_NOTHROW(parse_program(deep));
    CHECK_THROWS_AS(parse_program(deep, 2), ProgramParseError);
    CHECK_NOTHROW(parse_program(deep, 3));
}
