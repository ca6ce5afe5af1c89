#include "gpmrpp/program.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace gpmrpp {

namespace {

constexpr std::array<std::string_view, kFunctionCount> kFunctionNames = {
    "if-two-robots-on-each-others-path",
    "if-neighbor-is-surrounded",
    "if-robot-at-branch",
    "if-robot-at-destination",
    "if-robot-moving-to-branch",
    "if-neighbor-on-path-is-free",
    "if-robot-is-solved",
    "if-on-path-of-robot-in-network",
    "if-robot-in-network-moving-to-branch",
};

constexpr std::array<std::string_view, kTerminalCount> kTerminalNames = {
    "move-toward-branch",
    "move-to-free-neighbor",
    "move-toward-objective",
    "stay",
};

}  // namespace

std::string_view name_of(FunctionKind kind) {
    return kFunctionNames[static_cast<int>(kind)];
}

std::string_view name_of(TerminalKind kind) {
    return kTerminalNames[static_cast<int>(kind)];
}

std::optional<FunctionKind> function_from_name(std::string_view name) {
    for (int i = 0; i < kFunctionCount; ++i) {
        if (kFunctionNames[i] == name) return static_cast<FunctionKind>(i);
    }
    return std::nullopt;
}

std::optional<TerminalKind> terminal_from_name(std::string_view name) {
    for (int i = 0; i < kTerminalCount; ++i) {
        if (kTerminalNames[i] == name) return static_cast<TerminalKind>(i);
    }
    return std::nullopt;
}

int fragment_depth(std::span<const ProgramNode> nodes) {
    // Backward pass: children appear after their parent in preorder, so
    // right to left every child's size and depth are known when the
    // parent needs them.  Stored subtree sizes are not trusted because
    // freshly assembled fragments carry placeholders.
    thread_local std::vector<int> depths;
    thread_local std::vector<int> sizes;
    depths.assign(nodes.size(), 0);
    sizes.assign(nodes.size(), 1);
    for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
        if (nodes[i].is_function) {
            const int left = i + 1;
            const int right = left + sizes[left];
            depths[i] = 1 + std::max(depths[left], depths[right]);
            sizes[i] = 1 + sizes[left] + sizes[right];
        }
    }
    return nodes.empty() ? 0 : depths[0];
}

Program Program::from_nodes(std::vector<ProgramNode> nodes) {
    if (nodes.empty()) {
        throw std::invalid_argument("program has no nodes");
    }
    if (!nodes.front().is_function) {
        throw std::invalid_argument("program root must be a function");
    }
    for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
        if (!nodes[i].is_function) {
            nodes[i].subtree_size = 1;
            continue;
        }
        const int left = i + 1;
        if (left >= static_cast<int>(nodes.size())) {
            throw std::invalid_argument("function node missing children");
        }
        const int right = left + nodes[left].subtree_size;
        if (right >= static_cast<int>(nodes.size())) {
            throw std::invalid_argument("function node missing second child");
        }
        nodes[i].subtree_size = 1 + nodes[left].subtree_size + nodes[right].subtree_size;
    }
    if (nodes.front().subtree_size != static_cast<std::int32_t>(nodes.size())) {
        throw std::invalid_argument("trailing nodes after program root");
    }
    Program p;
    p.nodes_ = std::move(nodes);
    return p;
}

namespace {

void grow(int level, int max_depth, bool function_allowed, Rng& rng,
          std::vector<ProgramNode>& out) {
    int pick;
    if (level >= max_depth) {
        pick = kFunctionCount + static_cast<int>(rng.uniform_int(0, kTerminalCount - 1));
    } else if (function_allowed) {
        pick = static_cast<int>(rng.uniform_int(0, kFunctionCount + kTerminalCount - 1));
    } else {
        pick = static_cast<int>(rng.uniform_int(0, kFunctionCount - 1));
    }
    if (pick < kFunctionCount) {
        out.push_back({true, static_cast<std::uint8_t>(pick), 1});
        grow(level + 1, max_depth, true, rng, out);
        grow(level + 1, max_depth, true, rng, out);
    } else {
        out.push_back({false, static_cast<std::uint8_t>(pick - kFunctionCount), 1});
    }
}

}  // namespace

std::vector<ProgramNode> random_subtree(int max_depth, bool function_root, Rng& rng) {
    std::vector<ProgramNode> out;
    if (function_root) {
        const auto kind = static_cast<std::uint8_t>(rng.uniform_int(0, kFunctionCount - 1));
        out.push_back({true, kind, 1});
        grow(1, max_depth, true, rng, out);
        grow(1, max_depth, true, rng, out);
    } else {
        grow(0, max_depth, true, rng, out);
    }
    return out;
}

Program random_program(int max_depth, Rng& rng) {
    if (max_depth < 1) {
        throw std::invalid_argument("max_depth must be at least 1");
    }
    return Program::from_nodes(random_subtree(max_depth, true, rng));
}

namespace {

void serialize_node(const std::vector<ProgramNode>& nodes, int index, std::string& out) {
    const auto& node = nodes[index];
    out.push_back('(');
    if (node.is_function) {
        out += name_of(static_cast<FunctionKind>(node.kind));
        out.push_back(' ');
        const int left = index + 1;
        serialize_node(nodes, left, out);
        out.push_back(' ');
        serialize_node(nodes, left + nodes[left].subtree_size, out);
    } else {
        out += name_of(static_cast<TerminalKind>(node.kind));
    }
    out.push_back(')');
}

}  // namespace

std::string serialize_program(const Program& program) {
    std::string out;
    serialize_node(program.nodes(), 0, out);
    return out;
}

ProgramParseError::ProgramParseError(int line, int col, const std::string& why)
    : std::runtime_error("line " + std::to_string(line) + " col " + std::to_string(col) + ": " +
                         why),
      line(line),
      col(col) {}

namespace {

struct Token {
    enum Type { kLParen, kRParen, kSymbol, kEnd } type;
    std::string_view text;
    int line;
    int col;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_space_and_comments();
        if (pos_ >= text_.size()) return {Token::kEnd, {}, line_, col_};
        const int line = line_;
        const int col = col_;
        const char c = text_[pos_];
        if (c == '(') {
            advance();
            return {Token::kLParen, text_.substr(pos_ - 1, 1), line, col};
        }
        if (c == ')') {
            advance();
            return {Token::kRParen, text_.substr(pos_ - 1, 1), line, col};
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != '#') {
            advance();
        }
        return {Token::kSymbol, text_.substr(start, pos_ - start), line, col};
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { current_ = lexer_.next(); }

    std::vector<ProgramNode> parse_expression() {
        std::vector<ProgramNode> nodes;
        parse_node(nodes);
        if (current_.type != Token::kEnd) {
            fail("trailing text after program");
        }
        return nodes;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ProgramParseError(current_.line, current_.col, why);
    }

    void expect(Token::Type type, const char* what) {
        if (current_.type != type) fail(std::string("expected ") + what);
        current_ = lexer_.next();
    }

    void parse_node(std::vector<ProgramNode>& nodes) {
        if (current_.type == Token::kEnd) fail("unexpected end of input");
        if (current_.type == Token::kRParen) fail("unexpected ')'");
        expect(Token::kLParen, "'('");
        if (current_.type != Token::kSymbol) fail("expected a function or terminal name");
        const std::string_view name = current_.text;
        const Token name_token = current_;
        current_ = lexer_.next();

        if (const auto fn = function_from_name(name)) {
            nodes.push_back({true, static_cast<std::uint8_t>(*fn), 1});
            parse_node(nodes);
            parse_node(nodes);
            if (current_.type != Token::kRParen) {
                throw ProgramParseError(name_token.line, name_token.col,
                                        "'" + std::string(name) + "' takes exactly 2 arguments");
            }
            current_ = lexer_.next();
        } else if (const auto term = terminal_from_name(name)) {
            nodes.push_back({false, static_cast<std::uint8_t>(*term), 1});
            if (current_.type != Token::kRParen) {
                throw ProgramParseError(name_token.line, name_token.col,
                                        "'" + std::string(name) + "' takes no arguments");
            }
            current_ = lexer_.next();
        } else {
            throw ProgramParseError(name_token.line, name_token.col,
                                    "unknown symbol '" + std::string(name) + "'");
        }
    }

    Lexer lexer_;
    Token current_;
};

}  // namespace

Program parse_program(std::string_view text, int max_depth) {
    Parser parser(text);
    auto nodes = parser.parse_expression();
    const int depth = fragment_depth(nodes);
    if (depth < 1 || depth > max_depth) {
        throw ProgramParseError(1, 1,
                                "program depth " + std::to_string(depth) + " outside [1, " +
                                    std::to_string(max_depth) + "]");
    }
    return Program::from_nodes(std::move(nodes));
}

Program load_program_file(const std::string& path, int max_depth) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open program file " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_program(buffer.str(), max_depth);
}

void save_program_file(const Program& program, const std::string& path,
                       const std::string& comment) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write program file " + path);
    }
    if (!comment.empty()) {
        out << "# " << comment << "\n";
    }
    out << serialize_program(program) << "\n";
}

}  // namespace gpmrpp
