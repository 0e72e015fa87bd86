#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>

#include "eqsat/circuit.hpp"

namespace eqsat {
namespace {

constexpr int kMaxExprDepth = 10000;

bool ident_start(char ch) {
  return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || ch == '_';
}
bool ident_continue(char ch) {
  return ident_start(ch) || (ch >= '0' && ch <= '9') || ch == '[' || ch == ']';
}

struct Token {
  enum Kind { Ident, Equals, Semi, Star, Plus, Bang, LParen, RParen, ConstBit, End };
  Kind kind;
  std::string text;
  bool bit = false;
  int line = 1;
  int col = 1;
};

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }
  Token take() {
    Token t = current_;
    advance();
    return t;
  }

private:
  void advance() {
    skip_space();
    current_.line = line_;
    current_.col = col_;
    if (pos_ >= text_.size()) {
      current_.kind = Token::End;
      current_.text.clear();
      return;
    }
    char ch = text_[pos_];
    switch (ch) {
    case '=': current_ = make(Token::Equals, "="); return;
    case ';': current_ = make(Token::Semi, ";"); return;
    case '*': current_ = make(Token::Star, "*"); return;
    case '+': current_ = make(Token::Plus, "+"); return;
    case '!': current_ = make(Token::Bang, "!"); return;
    case '(': current_ = make(Token::LParen, "("); return;
    case ')': current_ = make(Token::RParen, ")"); return;
    default: break;
    }
    if (ch == '0' || ch == '1') {
      std::size_t next = pos_ + 1;
      if (next < text_.size() && (ident_continue(text_[next])))
        throw ParseError(fmt::format("bad token starting with '{}'", ch), line_, col_);
      current_ = make(Token::ConstBit, std::string(1, ch));
      current_.bit = ch == '1';
      return;
    }
    if (ident_start(ch)) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && ident_continue(text_[pos_]))
        step();
      current_.kind = Token::Ident;
      current_.text.assign(text_.substr(start, pos_ - start));
      return;
    }
    throw ParseError(fmt::format("unexpected character '{}'", ch), line_, col_);
  }

  Token make(Token::Kind k, std::string text) {
    Token t;
    t.kind = k;
    t.text = std::move(text);
    t.line = line_;
    t.col = col_;
    step();
    return t;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char ch = text_[pos_];
      if (ch == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n')
          step();
      } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
        step();
      } else {
        break;
      }
    }
  }

  void step() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

struct Expr {
  enum Kind { Ref, ConstBit, Not, And, Or } kind;
  std::string name; // Ref
  bool bit = false; // ConstBit
  int a = -1, b = -1;
  int line = 1, col = 1;
};

struct Assignment {
  std::string name;
  int expr;
  int line, col;
};

class Parser {
public:
  explicit Parser(std::string_view text) : lex_(text) {}

  void run() {
    while (lex_.peek().kind != Token::End)
      statement();
  }

  std::vector<std::pair<std::string, Token>> inputs;
  std::vector<std::pair<std::string, Token>> outputs;
  std::vector<Assignment> assignments;
  std::vector<Expr> arena;

private:
  void statement() {
    Token head = expect(Token::Ident, "signal name or INORDER/OUTORDER");
    expect(Token::Equals, "'='");
    if (head.text == "INORDER" || head.text == "OUTORDER") {
      auto& list = head.text == "INORDER" ? inputs : outputs;
      while (lex_.peek().kind == Token::Ident) {
        Token t = lex_.take();
        if (t.text == "INORDER" || t.text == "OUTORDER")
          throw ParseError("'" + t.text + "' is a reserved word", t.line, t.col);
        list.emplace_back(t.text, t);
      }
      expect(Token::Semi, "';'");
      return;
    }
    int expr = parse_or(0);
    expect(Token::Semi, "';'");
    assignments.push_back({head.text, expr, head.line, head.col});
  }

  int parse_or(int depth) {
    int left = parse_and(depth);
    while (lex_.peek().kind == Token::Plus) {
      Token op = lex_.take();
      int right = parse_and(depth);
      left = push({Expr::Or, {}, false, left, right, op.line, op.col});
    }
    return left;
  }

  int parse_and(int depth) {
    int left = parse_not(depth);
    while (lex_.peek().kind == Token::Star) {
      Token op = lex_.take();
      int right = parse_not(depth);
      left = push({Expr::And, {}, false, left, right, op.line, op.col});
    }
    return left;
  }

  int parse_not(int depth) {
    if (depth > kMaxExprDepth)
      throw ParseError("expression nested too deeply", lex_.peek().line, lex_.peek().col);
    if (lex_.peek().kind == Token::Bang) {
      Token op = lex_.take();
      int child = parse_not(depth + 1);
      return push({Expr::Not, {}, false, child, -1, op.line, op.col});
    }
    return parse_atom(depth);
  }

  int parse_atom(int depth) {
    Token t = lex_.peek();
    switch (t.kind) {
    case Token::LParen: {
      lex_.take();
      int inner = parse_or(depth + 1);
      expect(Token::RParen, "')'");
      return inner;
    }
    case Token::Ident: {
      lex_.take();
      if (t.text == "INORDER" || t.text == "OUTORDER")
        throw ParseError("'" + t.text + "' is a reserved word", t.line, t.col);
      return push({Expr::Ref, t.text, false, -1, -1, t.line, t.col});
    }
    case Token::ConstBit:
      lex_.take();
      return push({Expr::ConstBit, {}, t.bit, -1, -1, t.line, t.col});
    default:
      throw ParseError("expected an operand, got '" + describe(t) + "'", t.line, t.col);
    }
  }

  int push(Expr e) {
    arena.push_back(std::move(e));
    return static_cast<int>(arena.size() - 1);
  }

  Token expect(Token::Kind k, const char* what) {
    Token t = lex_.take();
    if (t.kind != k)
      throw ParseError(fmt::format("expected {}, got '{}'", what, describe(t)), t.line, t.col);
    return t;
  }

  static std::string describe(const Token& t) {
    return t.kind == Token::End ? "end of input" : t.text;
  }

  Lexer lex_;
};

void collect_refs(const std::vector<Expr>& arena, int root, std::vector<int>& refs) {
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    const Expr& e = arena[i];
    if (e.kind == Expr::Ref)
      refs.push_back(i);
    if (e.a >= 0)
      stack.push_back(e.a);
    if (e.b >= 0)
      stack.push_back(e.b);
  }
}

} // namespace

Circuit parse_equation(std::string_view text) {
  Parser parser(text);
  parser.run();

  std::unordered_map<std::string, std::size_t> assign_index;
  for (std::size_t i = 0; i < parser.assignments.size(); ++i) {
    const Assignment& a = parser.assignments[i];
    if (!assign_index.emplace(a.name, i).second)
      throw SemanticError(
          fmt::format("signal '{}' assigned more than once (line {})", a.name, a.line));
  }

  std::unordered_set<std::string> input_set;
  for (const auto& [name, tok] : parser.inputs) {
    if (!input_set.insert(name).second)
      throw SemanticError(fmt::format("duplicate input '{}' (line {})", name, tok.line));
    if (assign_index.contains(name))
      throw SemanticError(fmt::format("input '{}' is also assigned", name));
  }

  // Dependency check and topological order over assignments; definitions may
  // appear in any textual order.
  enum class Mark : std::uint8_t { White, Gray, Black };
  std::vector<Mark> mark(parser.assignments.size(), Mark::White);
  std::vector<std::size_t> topo;
  topo.reserve(parser.assignments.size());

  // Iterative DFS: (index, child cursor) over referenced assignments.
  std::vector<std::vector<std::size_t>> deps(parser.assignments.size());
  for (std::size_t i = 0; i < parser.assignments.size(); ++i) {
    std::vector<int> refs;
    collect_refs(parser.arena, parser.assignments[i].expr, refs);
    for (int r : refs) {
      const Expr& e = parser.arena[r];
      if (input_set.contains(e.name))
        continue;
      auto it = assign_index.find(e.name);
      if (it == assign_index.end())
        throw SemanticError(fmt::format("undefined signal '{}' (line {} col {})",
                                        e.name, e.line, e.col));
      deps[i].push_back(it->second);
    }
  }
  for (std::size_t start = 0; start < parser.assignments.size(); ++start) {
    if (mark[start] != Mark::White)
      continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
    mark[start] = Mark::Gray;
    while (!stack.empty()) {
      auto& [node, cursor] = stack.back();
      if (cursor < deps[node].size()) {
        std::size_t next = deps[node][cursor++];
        if (mark[next] == Mark::Gray)
          throw SemanticError(fmt::format("combinational cycle involving '{}'",
                                          parser.assignments[next].name));
        if (mark[next] == Mark::White) {
          mark[next] = Mark::Gray;
          stack.emplace_back(next, 0);
        }
      } else {
        mark[node] = Mark::Black;
        topo.push_back(node);
        stack.pop_back();
      }
    }
  }

  CircuitBuilder builder;
  std::unordered_map<std::string, NodeRef> resolved;
  for (const auto& [name, tok] : parser.inputs)
    resolved.emplace(name, builder.add_input(name));

  std::vector<NodeRef> value(parser.arena.size(), 0);
  auto eval = [&](int root) {
    std::vector<std::pair<int, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [i, expanded] = stack.back();
      stack.pop_back();
      const Expr& e = parser.arena[i];
      if (!expanded && (e.a >= 0 || e.b >= 0)) {
        stack.emplace_back(i, true);
        if (e.a >= 0)
          stack.emplace_back(e.a, false);
        if (e.b >= 0)
          stack.emplace_back(e.b, false);
        continue;
      }
      switch (e.kind) {
      case Expr::Ref:
        value[i] = resolved.at(e.name);
        break;
      case Expr::ConstBit:
        value[i] = builder.constant(e.bit);
        break;
      case Expr::Not:
        value[i] = builder.make_not(value[e.a]);
        break;
      case Expr::And:
        value[i] = builder.make_and(value[e.a], value[e.b]);
        break;
      case Expr::Or:
        value[i] = builder.make_or(value[e.a], value[e.b]);
        break;
      }
    }
    return value[root];
  };

  for (std::size_t i : topo) {
    const Assignment& a = parser.assignments[i];
    NodeRef r = eval(a.expr);
    builder.set_node_name(r, a.name);
    resolved.emplace(a.name, r);
  }

  for (const auto& [name, tok] : parser.outputs) {
    auto it = resolved.find(name);
    if (it == resolved.end())
      throw SemanticError(
          fmt::format("output '{}' is never assigned (line {})", name, tok.line));
    builder.add_output(name, it->second);
  }

  return builder.build();
}

std::string emit_equation(const Circuit& c) {
  std::vector<std::string> names(c.size());
  std::unordered_set<std::string> used;

  for (NodeRef r = 0; r < c.size(); ++r)
    if (c.node(r).kind == NodeKind::Input) {
      names[r] = c.inputs()[c.node(r).payload];
      used.insert(names[r]);
    }

  // Outputs claim the gate they drive so that `y = a * b;` style lines come
  // out directly; remaining outputs become aliases at the end.
  std::vector<std::pair<std::string, NodeRef>> aliases;
  for (const auto& [name, r] : c.outputs()) {
    if (c.is_gate(r) && names[r].empty()) {
      names[r] = name;
      used.insert(name);
    } else if (c.node(r).kind == NodeKind::Input && names[r] == name) {
      // OUTORDER mentions the input directly; no assignment line needed.
    } else {
      aliases.emplace_back(name, r);
    }
  }

  std::uint32_t fresh = 0;
  auto fresh_name = [&] {
    std::string candidate;
    do
      candidate = fmt::format("new_n{}_", fresh++);
    while (used.contains(candidate));
    used.insert(candidate);
    return candidate;
  };

  for (NodeRef r = 0; r < c.size(); ++r) {
    if (!c.is_gate(r) || !names[r].empty())
      continue;
    if (const std::string* stored = c.node_name(r); stored && !used.contains(*stored)) {
      names[r] = *stored;
      used.insert(*stored);
    } else {
      names[r] = fresh_name();
    }
  }

  auto operand = [&](NodeRef r) -> std::string {
    const CircuitNode& n = c.node(r);
    if (n.kind == NodeKind::Const)
      return n.payload ? "1" : "0";
    return names[r];
  };

  std::string out;
  if (!c.inputs().empty()) {
    out += "INORDER =";
    for (const auto& in : c.inputs()) {
      out += ' ';
      out += in;
    }
    out += ";\n";
  }
  if (!c.outputs().empty()) {
    out += "OUTORDER =";
    for (const auto& [name, r] : c.outputs()) {
      out += ' ';
      out += name;
    }
    out += ";\n";
  }
  for (NodeRef r = 0; r < c.size(); ++r) {
    const CircuitNode& n = c.node(r);
    switch (n.kind) {
    case NodeKind::Input:
    case NodeKind::Const:
      break;
    case NodeKind::Not:
      out += fmt::format("{} = !{};\n", names[r], operand(n.fanin0));
      break;
    case NodeKind::And:
      out += fmt::format("{} = {} * {};\n", names[r], operand(n.fanin0), operand(n.fanin1));
      break;
    case NodeKind::Or:
      out += fmt::format("{} = {} + {};\n", names[r], operand(n.fanin0), operand(n.fanin1));
      break;
    }
  }
  for (const auto& [name, r] : aliases)
    out += fmt::format("{} = {};\n", name, operand(r));
  return out;
}

} // namespace eqsat
