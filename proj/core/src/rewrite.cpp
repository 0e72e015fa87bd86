#include "eqsat/rewrite.hpp"

#include <algorithm>
#include <chrono>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace eqsat {
namespace {

struct PatternToken {
  enum Kind { LParen, RParen, Symbol, End } kind;
  std::string text;
};

class PatternLexer {
public:
  explicit PatternLexer(std::string_view text) : text_(text) {}

  PatternToken next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ >= text_.size())
      return {PatternToken::End, {}};
    char ch = text_[pos_];
    if (ch == '(') {
      ++pos_;
      return {PatternToken::LParen, "("};
    }
    if (ch == ')') {
      ++pos_;
      return {PatternToken::RParen, ")"};
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')')
      ++pos_;
    return {PatternToken::Symbol, std::string(text_.substr(start, pos_ - start))};
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace

Pattern Pattern::parse(std::string_view text) {
  Pattern p;
  PatternLexer lex(text);
  std::unordered_map<std::string, std::uint32_t> var_slots;

  auto intern_var = [&](const std::string& name) {
    auto it = var_slots.find(name);
    if (it != var_slots.end())
      return it->second;
    auto slot = static_cast<std::uint32_t>(p.vars_.size());
    p.vars_.push_back(name);
    var_slots.emplace(name, slot);
    return slot;
  };

  auto push = [&](Node n) {
    p.nodes_.push_back(n);
    return static_cast<int>(p.nodes_.size() - 1);
  };

  // Recursive descent over one prefix term.
  auto parse_term = [&](auto&& self, PatternToken tok) -> int {
    switch (tok.kind) {
    case PatternToken::Symbol: {
      const std::string& s = tok.text;
      if (s.size() >= 2 && s[0] == '?')
        return push({Node::Kind::Var, Op::And, false, intern_var(s.substr(1)), -1, -1});
      if (s == "0" || s == "1")
        return push({Node::Kind::Const, Op::And, s == "1", 0, -1, -1});
      throw RuleError("bad pattern atom '" + s + "'");
    }
    case PatternToken::LParen: {
      PatternToken head = lex.next();
      if (head.kind != PatternToken::Symbol)
        throw RuleError("expected an operator after '('");
      Op op;
      std::size_t arity;
      if (head.text == "*" || head.text == "and") {
        op = Op::And;
        arity = 2;
      } else if (head.text == "+" || head.text == "or") {
        op = Op::Or;
        arity = 2;
      } else if (head.text == "!" || head.text == "not") {
        op = Op::Not;
        arity = 1;
      } else {
        throw RuleError("unknown pattern operator '" + head.text + "'");
      }
      int c0 = self(self, lex.next());
      int c1 = -1;
      if (arity == 2)
        c1 = self(self, lex.next());
      PatternToken close = lex.next();
      if (close.kind != PatternToken::RParen)
        throw RuleError("expected ')' in pattern");
      return push({Node::Kind::Operator, op, false, 0, c0, c1});
    }
    default:
      throw RuleError("unexpected end of pattern");
    }
  };

  p.root_ = parse_term(parse_term, lex.next());
  if (lex.next().kind != PatternToken::End)
    throw RuleError("trailing tokens after pattern");
  return p;
}

bool Pattern::evaluate(std::span<const bool> var_values) const {
  std::vector<bool> value(nodes_.size());
  // nodes_ is in child-before-parent construction order
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
    case Node::Kind::Var:
      value[i] = var_values[n.var];
      break;
    case Node::Kind::Const:
      value[i] = n.bit;
      break;
    case Node::Kind::Operator:
      switch (n.op) {
      case Op::Not: value[i] = !value[n.child0]; break;
      case Op::And: value[i] = value[n.child0] && value[n.child1]; break;
      case Op::Or: value[i] = value[n.child0] || value[n.child1]; break;
      default: break;
      }
      break;
    }
  }
  return value[root_];
}

std::string Pattern::to_string() const {
  auto render = [&](auto&& self, int i) -> std::string {
    const Node& n = nodes_[i];
    switch (n.kind) {
    case Node::Kind::Var:
      return "?" + vars_[n.var];
    case Node::Kind::Const:
      return n.bit ? "1" : "0";
    case Node::Kind::Operator:
      if (n.op == Op::Not)
        return "(! " + self(self, n.child0) + ")";
      return fmt::format("({} {} {})", n.op == Op::And ? "*" : "+",
                         self(self, n.child0), self(self, n.child1));
    }
    return {};
  };
  return render(render, root_);
}

void Pattern::remap_variables(std::span<const std::uint32_t> mapping,
                              std::vector<std::string> new_names) {
  for (Node& n : nodes_)
    if (n.kind == Node::Kind::Var)
      n.var = mapping[n.var];
  vars_ = std::move(new_names);
}

Rule Rule::make(std::string name, std::string_view lhs_text, std::string_view rhs_text) {
  Pattern lhs = Pattern::parse(lhs_text);
  Pattern rhs = Pattern::parse(rhs_text);

  // Rebind RHS variable slots to the LHS table.
  std::vector<std::uint32_t> mapping(rhs.variables().size());
  for (std::size_t i = 0; i < rhs.variables().size(); ++i) {
    auto lhs_vars = lhs.variables();
    auto it = std::find(lhs_vars.begin(), lhs_vars.end(), rhs.variables()[i]);
    if (it == lhs_vars.end())
      throw RuleError(fmt::format("rule '{}': RHS variable '?{}' does not appear in the LHS",
                                  name, rhs.variables()[i]));
    mapping[i] = static_cast<std::uint32_t>(it - lhs_vars.begin());
  }
  rhs.remap_variables(mapping, {lhs.variables().begin(), lhs.variables().end()});

  // Soundness gate: LHS and RHS must agree on every assignment.
  std::size_t k = lhs.variables().size();
  if (k > 16)
    throw RuleError(fmt::format("rule '{}': too many variables to verify", name));
  bool values[16] = {};
  std::span<const bool> view(values, k);
  for (std::uint64_t bits = 0; bits < (1ull << k); ++bits) {
    for (std::size_t i = 0; i < k; ++i)
      values[i] = (bits >> i) & 1;
    if (lhs.evaluate(view) != rhs.evaluate(view))
      throw RuleError(fmt::format("rule '{}' is unsound: {} != {} under assignment {:#x}",
                                  name, lhs.to_string(), rhs.to_string(), bits));
  }

  return Rule{std::move(name), std::move(lhs), std::move(rhs)};
}

std::vector<Rule> default_rules() {
  std::vector<Rule> rules;
  rules.reserve(13);
  rules.push_back(Rule::make("and-commute", "(* ?a ?b)", "(* ?b ?a)"));
  rules.push_back(Rule::make("or-commute", "(+ ?a ?b)", "(+ ?b ?a)"));
  rules.push_back(Rule::make("and-assoc", "(* (* ?a ?b) ?c)", "(* ?a (* ?b ?c))"));
  rules.push_back(Rule::make("and-assoc-rev", "(* ?a (* ?b ?c))", "(* (* ?a ?b) ?c)"));
  rules.push_back(Rule::make("or-assoc", "(+ (+ ?a ?b) ?c)", "(+ ?a (+ ?b ?c))"));
  rules.push_back(Rule::make("or-assoc-rev", "(+ ?a (+ ?b ?c))", "(+ (+ ?a ?b) ?c)"));
  rules.push_back(Rule::make("and-over-or", "(* ?a (+ ?b ?c))", "(+ (* ?a ?b) (* ?a ?c))"));
  rules.push_back(Rule::make("or-factor", "(* (+ ?a ?b) (+ ?a ?c))", "(+ ?a (* ?b ?c))"));
  rules.push_back(Rule::make("and-factor", "(+ (* ?a ?b) (* ?a ?c))", "(* ?a (+ ?b ?c))"));
  rules.push_back(Rule::make("consensus-or",
                             "(+ (+ (* ?a ?b) (* (! ?a) ?c)) (* ?b ?c))",
                             "(+ (* ?a ?b) (* (! ?a) ?c))"));
  rules.push_back(Rule::make("consensus-and",
                             "(* (* (+ ?a ?b) (+ (! ?a) ?c)) (+ ?b ?c))",
                             "(* (+ ?a ?b) (+ (! ?a) ?c))"));
  rules.push_back(Rule::make("demorgan-and", "(! (* ?a ?b))", "(+ (! ?a) (! ?b))"));
  rules.push_back(Rule::make("demorgan-or", "(! (+ ?a ?b))", "(* (! ?a) (! ?b))"));
  return rules;
}

std::vector<Rule> rules_from_json(std::string_view json_text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw RuleError(std::string("rules file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw RuleError("rules file must be a JSON object mapping name -> {lhs, rhs}");
  std::vector<Rule> rules;
  for (auto& [name, body] : doc.items()) {
    if (!body.is_object() || !body.contains("lhs") || !body.contains("rhs") ||
        !body["lhs"].is_string() || !body["rhs"].is_string())
      throw RuleError(fmt::format("rule '{}' must be an object with string lhs/rhs", name));
    rules.push_back(Rule::make(name, body["lhs"].get<std::string>(),
                               body["rhs"].get<std::string>()));
  }
  return rules;
}

namespace {

/// Backtracking matcher for one pattern node against one class.
void match_node(const EGraph& g, const Pattern& p, int pidx, EClassId cls,
                std::vector<EClassId>& subst, std::vector<std::vector<EClassId>>& out) {
  const Pattern::Node& n = p.at(pidx);
  switch (n.kind) {
  case Pattern::Node::Kind::Var: {
    EClassId& slot = subst[n.var];
    if (slot.valid()) {
      if (slot == cls)
        out.push_back(subst);
      return;
    }
    slot = cls;
    out.push_back(subst);
    slot = EClassId{};
    return;
  }
  case Pattern::Node::Kind::Const: {
    for (const ENode& e : g.class_nodes(cls))
      if (e.op() == Op::Const && e.const_bit() == n.bit) {
        out.push_back(subst);
        return;
      }
    return;
  }
  case Pattern::Node::Kind::Operator: {
    for (const ENode& e : g.class_nodes(cls)) {
      if (e.op() != n.op)
        continue;
      if (n.op == Op::Not) {
        match_node(g, p, n.child0, g.find(e.children()[0]), subst, out);
      } else {
        std::vector<std::vector<EClassId>> first;
        match_node(g, p, n.child0, g.find(e.children()[0]), subst, first);
        for (auto& s : first)
          match_node(g, p, n.child1, g.find(e.children()[1]), s, out);
      }
    }
    return;
  }
  }
}

} // namespace

std::vector<Match> ematch(const EGraph& g, const Pattern& p) {
  std::vector<Match> matches;
  std::vector<EClassId> empty(p.variables().size());
  for (EClassId cls : g.class_ids()) {
    std::vector<std::vector<EClassId>> found;
    std::vector<EClassId> subst = empty;
    match_node(g, p, p.root_index(), cls, subst, found);
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a < b; });
    found.erase(std::unique(found.begin(), found.end()), found.end());
    for (auto& s : found)
      matches.push_back({cls, std::move(s)});
  }
  return matches;
}

EClassId instantiate(EGraph& g, const Pattern& p, std::span<const EClassId> subst) {
  auto build = [&](auto&& self, int i) -> EClassId {
    const Pattern::Node& n = p.at(i);
    switch (n.kind) {
    case Pattern::Node::Kind::Var:
      return subst[n.var];
    case Pattern::Node::Kind::Const:
      return g.add_const(n.bit);
    case Pattern::Node::Kind::Operator:
      switch (n.op) {
      case Op::Not:
        return g.add(ENode::make_not(self(self, n.child0)));
      case Op::And:
        return g.add(ENode::make_and(self(self, n.child0), self(self, n.child1)));
      case Op::Or:
        return g.add(ENode::make_or(self(self, n.child0), self(self, n.child1)));
      default:
        break;
      }
      break;
    }
    throw RuleError("malformed pattern node");
  };
  return build(build, p.root_index());
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
  case StopReason::Saturated: return "saturated";
  case StopReason::IterationLimit: return "iteration-limit";
  case StopReason::NodeLimit: return "node-limit";
  case StopReason::TimeLimit: return "time-limit";
  }
  return "?";
}

RunReport run_saturation(EGraph& g, const RunnerConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  g.rebuild();
  RunReport report;
  report.nodes_before = g.num_nodes();
  report.classes_before = g.num_classes();
  report.stop_reason = StopReason::IterationLimit;

  for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
    // Match phase: every rule against the iteration-start snapshot.
    auto match_start = Clock::now();
    std::vector<std::vector<Match>> matches;
    matches.reserve(cfg.rules.size());
    std::size_t total = 0;
    for (const Rule& rule : cfg.rules) {
      matches.push_back(ematch(g, rule.lhs));
      total += matches.back().size();
    }
    auto apply_start = Clock::now();
    report.match_seconds +=
        std::chrono::duration<double>(apply_start - match_start).count();

    // Apply phase: instantiate RHS terms and merge with the matched class.
    bool changed = false;
    for (std::size_t ri = 0; ri < cfg.rules.size(); ++ri) {
      for (const Match& m : matches[ri]) {
        EClassId rhs = instantiate(g, cfg.rules[ri].rhs, m.subst);
        changed |= g.merge(m.cls, rhs);
      }
    }
    auto rebuild_start = Clock::now();
    report.apply_seconds +=
        std::chrono::duration<double>(rebuild_start - apply_start).count();

    g.rebuild();
    report.rebuild_seconds +=
        std::chrono::duration<double>(Clock::now() - rebuild_start).count();

    report.matches_per_iteration.push_back(total);
    report.iterations_run = iter;

    if (!changed) {
      report.stop_reason = StopReason::Saturated;
      break;
    }
    if (g.num_nodes() > cfg.max_nodes) {
      report.stop_reason = StopReason::NodeLimit;
      break;
    }
    if (Clock::now() - start > cfg.time_limit) {
      report.stop_reason = StopReason::TimeLimit;
      break;
    }
  }

  report.nodes_after = g.num_nodes();
  report.classes_after = g.num_classes();
  return report;
}

} // namespace eqsat
