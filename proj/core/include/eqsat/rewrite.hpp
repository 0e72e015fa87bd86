#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqsat/egraph.hpp"

namespace eqsat {

/// A term tree over {And, Or, Not, Const} with named pattern variables at the
/// leaves, written in prefix syntax: `(+ (* ?a ?b) (* ?a ?c))`, `(! ?a)`,
/// `?x`, `0`, `1`. Operator aliases `and`, `or`, `not` are accepted.
class Pattern {
public:
  struct Node {
    enum class Kind : std::uint8_t { Var, Const, Operator } kind;
    Op op = Op::And;        // Operator
    bool bit = false;       // Const
    std::uint32_t var = 0;  // Var: slot into variables()
    int child0 = -1, child1 = -1;
  };

  static Pattern parse(std::string_view text);

  const Node& root() const { return nodes_[root_]; }
  int root_index() const { return root_; }
  const Node& at(int i) const { return nodes_[i]; }
  std::span<const std::string> variables() const { return vars_; }

  /// Evaluate as a Boolean function of its variables.
  bool evaluate(std::span<const bool> var_values) const;

  std::string to_string() const;

  /// Renumber variable slots through `mapping` (new slot per old slot).
  void remap_variables(std::span<const std::uint32_t> mapping,
                       std::vector<std::string> new_names);

private:
  std::vector<Node> nodes_;
  std::vector<std::string> vars_;
  int root_ = -1;
};

/// A rewrite rule lhs -> rhs. Registration via make() checks that every RHS
/// variable appears in the LHS and that both sides compute the same Boolean
/// function (exhaustive over all variable assignments).
struct Rule {
  std::string name;
  Pattern lhs;
  Pattern rhs;

  static Rule make(std::string name, std::string_view lhs, std::string_view rhs);
};

/// The default Boolean rule set: commutativity of And/Or, associativity of
/// And/Or in both directions, the three distributivity forms, both consensus
/// forms, and both De Morgan forms — 13 rules.
std::vector<Rule> default_rules();

/// Load additional rules from JSON: {"rule-name": {"lhs": "...", "rhs": "..."}}.
std::vector<Rule> rules_from_json(std::string_view json_text);

struct Match {
  EClassId cls;
  std::vector<EClassId> subst; // one canonical class per LHS variable slot
};

/// All matches of `p` in the (rebuilt) graph, modulo class equivalence.
std::vector<Match> ematch(const EGraph& g, const Pattern& p);

/// Instantiate a pattern in the graph under a substitution (slots resolved
/// against the pattern's own variable table).
EClassId instantiate(EGraph& g, const Pattern& p, std::span<const EClassId> subst);

enum class StopReason { Saturated, IterationLimit, NodeLimit, TimeLimit };
std::string_view stop_reason_name(StopReason r);

struct RunnerConfig {
  std::size_t max_iterations = 5;
  std::size_t max_nodes = 1'000'000;
  std::chrono::duration<double> time_limit = std::chrono::seconds(60);
  std::vector<Rule> rules;
};

struct RunReport {
  std::size_t iterations_run = 0;
  StopReason stop_reason = StopReason::Saturated;
  std::size_t nodes_before = 0, nodes_after = 0;
  std::size_t classes_before = 0, classes_after = 0;
  std::vector<std::size_t> matches_per_iteration;
  double match_seconds = 0, apply_seconds = 0, rebuild_seconds = 0;
};

/// Bounded equality saturation: per iteration, match every rule against the
/// iteration-start graph, then add/merge every RHS instantiation, then
/// rebuild. Stops on saturation or the first exceeded limit (checked between
/// iterations). max_iterations == 0 returns immediately without touching g.
RunReport run_saturation(EGraph& g, const RunnerConfig& cfg);

} // namespace eqsat
