#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eqsat/errors.hpp"

namespace eqsat {

/// Opaque handle of an e-class.
struct EClassId {
  std::uint32_t value = 0xffffffffu;

  constexpr bool valid() const { return value != 0xffffffffu; }
  friend constexpr bool operator==(EClassId, EClassId) = default;
  friend constexpr auto operator<=>(EClassId, EClassId) = default;
};

struct EClassIdHash {
  std::size_t operator()(EClassId id) const { return id.value; }
};

enum class Op : std::uint8_t { Var, Const, Not, And, Or };

constexpr std::size_t op_arity(Op op) {
  switch (op) {
  case Op::Var:
  case Op::Const:
    return 0;
  case Op::Not:
    return 1;
  case Op::And:
  case Op::Or:
    return 2;
  }
  return 0;
}

std::string_view op_name(Op op);

/// An operator applied to child e-classes. Var carries a symbol-table index
/// owned by the EGraph; Const carries its bit. Children are ordered:
/// And(a, b) and And(b, a) are structurally distinct (commutativity is a
/// rewrite rule, not a normalization).
class ENode {
public:
  static ENode var(std::uint32_t symbol) { return ENode(Op::Var, symbol, {}, {}); }
  static ENode constant(bool bit) { return ENode(Op::Const, bit ? 1u : 0u, {}, {}); }
  static ENode make_not(EClassId a) { return ENode(Op::Not, 0, a, {}); }
  static ENode make_and(EClassId a, EClassId b) { return ENode(Op::And, 0, a, b); }
  static ENode make_or(EClassId a, EClassId b) { return ENode(Op::Or, 0, a, b); }

  Op op() const { return op_; }
  std::uint32_t symbol() const { return payload_; }
  bool const_bit() const { return payload_ != 0; }
  std::size_t arity() const { return op_arity(op_); }

  std::span<const EClassId> children() const { return {children_.data(), arity()}; }
  std::span<EClassId> children() { return {children_.data(), arity()}; }

  bool operator==(const ENode&) const = default;
  auto operator<=>(const ENode&) const = default;

private:
  ENode(Op op, std::uint32_t payload, EClassId a, EClassId b)
      : op_(op), payload_(payload), children_{a, b} {}

  Op op_;
  std::uint32_t payload_;
  std::array<EClassId, 2> children_;
};

struct ENodeHash {
  std::size_t operator()(const ENode& n) const {
    std::uint64_t h = static_cast<std::uint64_t>(n.op()) * 0x9e3779b97f4a7c15ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(n.symbol());
    for (EClassId c : n.children())
      mix(c.value);
    return static_cast<std::size_t>(h);
  }
};

/// Hashconsed e-nodes grouped into e-classes under a union-find with deferred
/// congruence closure: merge() only records work, rebuild() restores the
/// hashcons and congruence invariants in one batch.
///
/// Mutation is single-threaded. freeze() fully canonicalizes the structure so
/// a const EGraph& can be shared by concurrent readers (extraction workers).
class EGraph {
public:
  /// Returns the class of a congruent existing node, or creates a fresh
  /// singleton class. Children must be valid ids.
  EClassId add(ENode n);
  EClassId add_var(std::string_view name);
  EClassId add_const(bool bit);

  /// Unions two classes. Returns true iff they were distinct; the graph is
  /// dirty until the next rebuild().
  bool merge(EClassId a, EClassId b);

  /// Restores the hashcons and congruence invariants; no-op when clean.
  void rebuild();
  bool clean() const { return !dirty_; }

  /// rebuild() + path compression + deterministic parent lists; after this
  /// the graph is safe for shared read-only use.
  void freeze();

  EClassId find(EClassId id) const;
  std::span<const ENode> class_nodes(EClassId id) const;
  std::span<const std::pair<ENode, EClassId>> parents(EClassId id) const;

  std::size_t num_nodes() const { return hashcons_.size(); }
  std::size_t num_classes() const { return num_classes_; }
  /// Canonical class ids in ascending order.
  std::vector<EClassId> class_ids() const;

  std::uint32_t intern_symbol(std::string_view name);
  const std::string& symbol_name(std::uint32_t symbol) const { return symbols_[symbol]; }
  std::size_t num_symbols() const { return symbols_.size(); }

  void set_roots(std::vector<EClassId> roots) { roots_ = std::move(roots); }
  const std::vector<EClassId>& roots() const { return roots_; }

  /// Raw construction hooks for deserialization: reserve_class creates an
  /// empty class; insert_node_raw files a node without hashconsing. The graph
  /// is invalid until the following rebuild().
  EClassId reserve_class();
  void insert_node_raw(EClassId cls, ENode n);

private:
  struct EClassData {
    std::vector<ENode> nodes;
    std::vector<std::pair<ENode, EClassId>> parents;
  };

  EClassId find_mut(EClassId id); // path-compressing
  void check_id(EClassId id) const;
  ENode canonical(ENode n) const;
  bool unite(EClassId a, EClassId b); // no dirty marking
  void rebuild_parents();

  std::vector<std::uint32_t> uf_;
  std::vector<EClassData> classes_;
  std::unordered_map<ENode, EClassId, ENodeHash> hashcons_;
  std::size_t num_classes_ = 0;
  bool dirty_ = false;

  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::uint32_t> symbol_ids_;
  std::vector<EClassId> roots_;
};

} // namespace eqsat
