#include "firenav/bt/parser.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace firenav::bt {

namespace {

struct Line {
  std::string file;
  int number = 0;
  std::vector<std::string> tokens;
};

[[noreturn]] void fail(const Line& line, const std::string& msg) {
  throw ParseError("parse error at " + line.file + ":" +
                   std::to_string(line.number) + ": " + msg);
}

std::vector<std::string> tokenize(const std::string& raw, const Line& where) {
  std::vector<std::string> tokens;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (quoted) {
      if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      continue;
    }
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    if (c == '{' || c == '}') {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
      tokens.push_back(std::string(1, c));
      continue;
    }
    cur.push_back(c);
  }
  if (quoted) fail(where, "unterminated quote");
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::vector<Line> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open tree file: " + path);
  std::vector<Line> lines;
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    Line line{path, ++n, {}};
    line.tokens = tokenize(raw, line);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<Line> read_lines_text(const std::string& text,
                                  const std::string& origin) {
  std::istringstream in(text);
  std::vector<Line> lines;
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    Line line{origin, ++n, {}};
    line.tokens = tokenize(raw, line);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

struct Parser {
  std::vector<Line> lines;
  std::size_t pos = 0;
  std::string dir;  // directory for resolving includes
  std::set<std::string> include_stack;
  const std::map<std::string, std::string>* substitutions = nullptr;

  bool done() const { return pos >= lines.size(); }
  const Line& cur() const { return lines[pos]; }

  std::string substitute(const std::string& token, const Line& where) const {
    if (!substitutions) {
      if (token.find('$') != std::string::npos)
        fail(where, "unbound parameter in " + token);
      return token;
    }
    std::string out;
    for (std::size_t i = 0; i < token.size(); ++i) {
      if (token[i] != '$') {
        out.push_back(token[i]);
        continue;
      }
      std::size_t j = i + 1;
      while (j < token.size() &&
             (std::isalnum(static_cast<unsigned char>(token[j])) ||
              token[j] == '_'))
        ++j;
      const std::string name = token.substr(i + 1, j - i - 1);
      const auto it = substitutions->find(name);
      if (it == substitutions->end())
        fail(where, "unbound parameter $" + name);
      out += it->second;
      i = j - 1;
    }
    return out;
  }

  std::unique_ptr<BtNode> parse_node();
  std::vector<std::unique_ptr<BtNode>> parse_children(const Line& opener);
};

ParamValue make_param(const std::string& value) {
  if (!value.empty() && value.front() == '@')
    return {value.substr(1), true};
  return {value, false};
}

std::unique_ptr<BtNode> build_subtree(const std::string& path,
                                      const std::map<std::string, std::string>& args,
                                      std::set<std::string> include_stack);

std::unique_ptr<BtNode> Parser::parse_node() {
  const Line line = cur();
  ++pos;

  const std::string& kind = line.tokens.front();
  std::map<std::string, std::string> attrs;
  bool open_brace = false;
  for (std::size_t i = 1; i < line.tokens.size(); ++i) {
    const std::string tok = substitute(line.tokens[i], line);
    if (tok == "{") {
      if (i + 1 != line.tokens.size()) fail(line, "'{' must end the line");
      open_brace = true;
      break;
    }
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      fail(line, "expected key=value, got '" + tok + "'");
    attrs[tok.substr(0, eq)] = tok.substr(eq + 1);
  }

  auto name_or = [&](const std::string& fallback) {
    const auto it = attrs.find("name");
    return it == attrs.end() ? fallback : it->second;
  };

  if (kind == "Sequence" || kind == "Parallel" || kind == "ForceSuccess") {
    if (!open_brace) fail(line, kind + " requires a '{' block");
    auto kids = parse_children(line);
    if (kids.empty()) fail(line, kind + " requires at least one child");
    if (kind == "Sequence")
      return std::make_unique<SequenceNode>(name_or("Sequence"),
                                            std::move(kids));
    if (kind == "Parallel") {
      int threshold = 1;
      if (attrs.count("threshold")) threshold = std::stoi(attrs["threshold"]);
      if (threshold < 1) fail(line, "threshold must be >= 1");
      return std::make_unique<ParallelNode>(name_or("Parallel"),
                                            std::move(kids), threshold);
    }
    if (kids.size() != 1) fail(line, "ForceSuccess takes exactly one child");
    return std::make_unique<ForceSuccessNode>(name_or("ForceSuccess"),
                                              std::move(kids));
  }

  if (open_brace) fail(line, kind + " is a leaf and cannot have children");

  if (kind == "CheckBool") {
    if (!attrs.count("key")) fail(line, "CheckBool requires key=");
    return std::make_unique<CheckBoolNode>(name_or("CheckBool"),
                                           attrs["key"]);
  }
  if (kind == "MathOperationFloat") {
    for (const char* req : {"op", "in", "in2", "out"})
      if (!attrs.count(req))
        fail(line, std::string("MathOperationFloat requires ") + req + "=");
    const std::string& op = attrs["op"];
    if (op != "add" && op != "sub" && op != "mul")
      fail(line, "unknown op '" + op + "' (add|sub|mul)");
    return std::make_unique<MathOperationFloatNode>(
        name_or("MathOperationFloat"), op, make_param(attrs["in"]),
        make_param(attrs["in2"]), attrs["out"]);
  }
  if (kind == "Action") {
    if (!attrs.count("task")) fail(line, "Action requires task=");
    const std::string task = attrs["task"];
    ParamMap params;
    for (const auto& [k, v] : attrs) {
      if (k == "name" || k == "task") continue;
      params[k] = make_param(v);
    }
    return std::make_unique<ActionNode>(name_or(task), task,
                                        std::move(params));
  }
  if (kind == "Subtree") {
    if (!attrs.count("file")) fail(line, "Subtree requires file=");
    const std::filesystem::path inc =
        std::filesystem::path(dir) / attrs["file"];
    const std::string key = std::filesystem::weakly_canonical(inc).string();
    if (include_stack.count(key))
      fail(line, "cyclic include of " + attrs["file"]);
    std::map<std::string, std::string> args;
    for (const auto& [k, v] : attrs)
      if (k != "file" && k != "name") args[k] = v;
    auto stack = include_stack;
    stack.insert(key);
    try {
      return build_subtree(inc.string(), args, std::move(stack));
    } catch (const ParseError&) {
      throw;
    }
  }
  fail(line, "unknown node type '" + kind + "'");
}

std::vector<std::unique_ptr<BtNode>> Parser::parse_children(
    const Line& opener) {
  std::vector<std::unique_ptr<BtNode>> kids;
  while (true) {
    if (done()) fail(opener, "unterminated '{' block");
    if (cur().tokens.size() == 1 && cur().tokens.front() == "}") {
      ++pos;
      return kids;
    }
    kids.push_back(parse_node());
  }
}

std::unique_ptr<BtNode> run_parser(std::vector<Line> lines, std::string dir,
                                   const std::map<std::string, std::string>* subs,
                                   std::set<std::string> include_stack) {
  Parser p;
  p.lines = std::move(lines);
  p.dir = std::move(dir);
  p.substitutions = subs;
  p.include_stack = std::move(include_stack);
  if (p.done()) throw ParseError("empty tree definition");
  auto root = p.parse_node();
  if (!p.done()) fail(p.cur(), "trailing content after root node");
  return root;
}

std::unique_ptr<BtNode> build_subtree(
    const std::string& path, const std::map<std::string, std::string>& args,
    std::set<std::string> include_stack) {
  auto lines = read_lines(path);
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return run_parser(std::move(lines), dir, &args, std::move(include_stack));
}

}  // namespace

std::unique_ptr<BtNode> parse_tree(const std::string& path) {
  auto lines = read_lines(path);
  const std::string dir = std::filesystem::path(path).parent_path().string();
  const std::string key =
      std::filesystem::weakly_canonical(std::filesystem::path(path)).string();
  return run_parser(std::move(lines), dir, nullptr, {key});
}

std::unique_ptr<BtNode> parse_tree_text(const std::string& text,
                                        const std::string& origin) {
  return run_parser(read_lines_text(text, origin), ".", nullptr, {});
}

}  // namespace firenav::bt
