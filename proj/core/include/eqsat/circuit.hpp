#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "eqsat/errors.hpp"

namespace eqsat {

/// Index of a node inside a Circuit. Children always precede parents.
using NodeRef = std::uint32_t;

enum class NodeKind : std::uint8_t { Input, Const, Not, And, Or };

struct CircuitNode {
  NodeKind kind;
  NodeRef fanin0 = 0; ///< Not/And/Or
  NodeRef fanin1 = 0; ///< And/Or
  /// Input: index into Circuit::inputs(); Const: the bit.
  std::uint32_t payload = 0;

  bool operator==(const CircuitNode&) const = default;
};

struct CircuitStats {
  std::size_t node_count = 0; ///< And/Or/Not gates
  std::size_t depth = 0;      ///< longest input-to-output gate path
  std::size_t input_count = 0;
  std::size_t output_count = 0;
};

/// An immutable combinational Boolean circuit: a DAG of Input/Const/Not/And/Or
/// nodes stored in topological order, with named primary inputs and outputs.
/// Structurally identical gates are shared (the builder hashconses), so two
/// distinct node indices never carry the same (kind, fanins) triple.
class Circuit {
public:
  Circuit() = default;

  std::size_t size() const { return nodes_.size(); }
  const CircuitNode& node(NodeRef r) const { return nodes_[r]; }
  std::span<const CircuitNode> nodes() const { return nodes_; }

  std::span<const std::string> inputs() const { return inputs_; }
  const std::vector<std::pair<std::string, NodeRef>>& outputs() const { return outputs_; }
  const std::string& name() const { return name_; }

  bool is_gate(NodeRef r) const {
    NodeKind k = nodes_[r].kind;
    return k == NodeKind::Not || k == NodeKind::And || k == NodeKind::Or;
  }

  /// Signal name recorded for this node, if any (inputs always have one).
  const std::string* node_name(NodeRef r) const;

private:
  friend class CircuitBuilder;
  std::string name_;
  std::vector<std::string> inputs_;
  std::vector<CircuitNode> nodes_;
  std::vector<std::pair<std::string, NodeRef>> outputs_;
  std::unordered_map<NodeRef, std::string> node_names_;
};

/// Incremental, hashconsing circuit constructor. All make_* calls return the
/// existing node when an identical one was built before.
class CircuitBuilder {
public:
  explicit CircuitBuilder(std::string design_name = {});

  NodeRef add_input(std::string name);
  NodeRef constant(bool bit);
  NodeRef make_not(NodeRef a);
  NodeRef make_and(NodeRef a, NodeRef b);
  NodeRef make_or(NodeRef a, NodeRef b);

  /// Record a signal name for a node (first name sticks).
  void set_node_name(NodeRef r, std::string name);
  void add_output(std::string name, NodeRef r);

  std::size_t size() const { return circuit_.nodes_.size(); }

  /// Validates output naming rules and finishes the circuit.
  Circuit build();

private:
  NodeRef intern(CircuitNode n);
  void check_ref(NodeRef r) const;

  Circuit circuit_;
  struct NodeKey {
    CircuitNode n;
    bool operator==(const NodeKey&) const = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const;
  };
  std::unordered_map<NodeKey, NodeRef, NodeKeyHash> strash_;
  std::unordered_map<std::string, NodeRef> signal_names_;
  std::unordered_set<std::string> output_names_;
};

/// Parse the equation netlist format:
///
///   INORDER  = a b c;
///   OUTORDER = y;
///   t1 = a * b;
///   y  = !(t1 + c);
///
/// `*` is AND, `+` is OR, `!` is NOT; `*` binds tighter than `+`, `!` tightest.
/// Identifiers match [A-Za-z_][A-Za-z0-9_\[\]]*; `0`/`1` are constants;
/// `#` starts a line comment. Assignments may appear in any order.
Circuit parse_equation(std::string_view text);

/// Inverse of parse_equation: emits one assignment per gate in topological
/// order. emit_equation(parse_equation(t)) reparses to a structurally
/// identical circuit.
std::string emit_equation(const Circuit& c);

CircuitStats stats(const Circuit& c);

/// Evaluate the circuit on one assignment; result is aligned with outputs().
/// Throws MissingInput if the assignment does not cover every input.
std::vector<bool> simulate(const Circuit& c,
                           const std::unordered_map<std::string, bool>& assignment);

/// 64 assignments at once: input_words[i] carries one bit per lane for
/// inputs()[i]; the result is one word per output.
std::vector<std::uint64_t> simulate_words(const Circuit& c,
                                          std::span<const std::uint64_t> input_words);

} // namespace eqsat
