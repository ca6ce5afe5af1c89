#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gpmrpp/workspace.hpp"

namespace gpmrpp {

/// Plain-text problem format, one directive per line:
///
///     nodes <count>
///     edge <u> <v>          (one per edge, u < v)
///     robot <id> <start> <goal>
///
/// Blank lines and lines starting with '#' are ignored.  Serialization is
/// canonical (edges and robots sorted ascending), so a serialize/parse
/// round trip reproduces the text byte for byte.
std::string serialize_problem(const ProblemInstance& problem);

/// Throws std::runtime_error naming the line of the first offending
/// directive.  `label` is attached to the returned instance.
ProblemInstance parse_problem(std::string_view text, std::string label = {});

ProblemInstance load_problem_file(const std::filesystem::path& path);
void save_problem_file(const ProblemInstance& problem, const std::filesystem::path& path);

}  // namespace gpmrpp
