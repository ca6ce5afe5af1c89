#include "gpmrpp/problem_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpmrpp {

std::string serialize_problem(const ProblemInstance& problem) {
    std::ostringstream out;
    out << "nodes " << problem.workspace.node_count() << "\n";
    for (const auto& [u, v] : problem.workspace.edges()) {
        out << "edge " << u << " " << v << "\n";
    }
    for (const auto& r : problem.robots) {
        out << "robot " << r.id << " " << r.start << " " << r.goal << "\n";
    }
    return out.str();
}

ProblemInstance parse_problem(std::string_view text, std::string label) {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;

    int node_count = -1;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<RobotSpec> robots;

    const auto fail = [&line_no](const std::string& why) -> void {
        throw std::runtime_error("problem file line " + std::to_string(line_no) + ": " + why);
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string keyword;
        if (!(fields >> keyword) || keyword[0] == '#') continue;

        if (keyword == "nodes") {
            if (node_count >= 0) fail("duplicate nodes directive");
            if (!(fields >> node_count) || node_count < 1) fail("invalid node count");
        } else if (keyword == "edge") {
            NodeId u = 0;
            NodeId v = 0;
            if (!(fields >> u >> v)) fail("edge needs two node ids");
            edges.emplace_back(u, v);
        } else if (keyword == "robot") {
            RobotSpec r;
            if (!(fields >> r.id >> r.start >> r.goal)) fail("robot needs id, start, goal");
            robots.push_back(r);
        } else {
            fail("unknown directive '" + keyword + "'");
        }
        std::string extra;
        if (fields >> extra) fail("trailing text '" + extra + "'");
    }

    line_no = 0;  // errors below are about the file as a whole
    if (node_count < 0) {
        throw std::runtime_error("problem file: missing nodes directive");
    }
    try {
        ProblemInstance problem{Workspace(node_count, std::move(edges)), std::move(robots),
                                std::move(label)};
        validate_problem(problem);
        return problem;
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("problem file: ") + e.what());
    }
}

ProblemInstance load_problem_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open problem file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_problem(buffer.str(), path.stem().string());
}

void save_problem_file(const ProblemInstance& problem, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write problem file " + path.string());
    }
    out << serialize_problem(problem);
}

}  // namespace gpmrpp
