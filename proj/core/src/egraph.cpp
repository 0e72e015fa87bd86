#include "eqsat/egraph.hpp"

#include <algorithm>

namespace eqsat {

std::string_view op_name(Op op) {
  switch (op) {
  case Op::Var: return "var";
  case Op::Const: return "const";
  case Op::Not: return "not";
  case Op::And: return "and";
  case Op::Or: return "or";
  }
  return "?";
}

void EGraph::check_id(EClassId id) const {
  if (!id.valid() || id.value >= uf_.size())
    throw UnknownId("unknown e-class id " + std::to_string(id.value));
}

EClassId EGraph::find(EClassId id) const {
  check_id(id);
  std::uint32_t x = id.value;
  while (uf_[x] != x)
    x = uf_[x];
  return EClassId{x};
}

EClassId EGraph::find_mut(EClassId id) {
  check_id(id);
  std::uint32_t root = id.value;
  while (uf_[root] != root)
    root = uf_[root];
  std::uint32_t x = id.value;
  while (uf_[x] != root) {
    std::uint32_t next = uf_[x];
    uf_[x] = root;
    x = next;
  }
  return EClassId{root};
}

ENode EGraph::canonical(ENode n) const {
  for (EClassId& c : n.children())
    c = find(c);
  return n;
}

EClassId EGraph::reserve_class() {
  auto id = static_cast<std::uint32_t>(uf_.size());
  uf_.push_back(id);
  classes_.emplace_back();
  ++num_classes_;
  return EClassId{id};
}

EClassId EGraph::add(ENode n) {
  for (EClassId& c : n.children()) {
    if (!c.valid() || c.value >= uf_.size())
      throw InvalidChildId("e-node child " + std::to_string(c.value) +
                           " is not a class of this graph");
    c = find_mut(c);
  }
  auto it = hashcons_.find(n);
  if (it != hashcons_.end())
    return find_mut(it->second);

  EClassId id = reserve_class();
  classes_[id.value].nodes.push_back(n);
  hashcons_.emplace(n, id);

  EClassId prev{};
  for (EClassId c : n.children()) {
    if (c == prev)
      continue; // And(x, x): one parent entry
    classes_[c.value].parents.emplace_back(n, id);
    prev = c;
  }
  return id;
}

EClassId EGraph::add_var(std::string_view name) {
  return add(ENode::var(intern_symbol(name)));
}

EClassId EGraph::add_const(bool bit) {
  return add(ENode::constant(bit));
}

std::uint32_t EGraph::intern_symbol(std::string_view name) {
  auto it = symbol_ids_.find(std::string(name));
  if (it != symbol_ids_.end())
    return it->second;
  auto id = static_cast<std::uint32_t>(symbols_.size());
  symbols_.emplace_back(name);
  symbol_ids_.emplace(symbols_.back(), id);
  return id;
}

bool EGraph::unite(EClassId a, EClassId b) {
  a = find_mut(a);
  b = find_mut(b);
  if (a == b)
    return false;
  // Keep the class with more payload as the root to bound splice cost.
  auto weight = [this](EClassId id) {
    return classes_[id.value].nodes.size() + classes_[id.value].parents.size();
  };
  if (weight(a) < weight(b))
    std::swap(a, b);
  uf_[b.value] = a.value;
  auto& win = classes_[a.value];
  auto& lose = classes_[b.value];
  win.nodes.insert(win.nodes.end(), std::make_move_iterator(lose.nodes.begin()),
                   std::make_move_iterator(lose.nodes.end()));
  win.parents.insert(win.parents.end(),
                     std::make_move_iterator(lose.parents.begin()),
                     std::make_move_iterator(lose.parents.end()));
  lose.nodes.clear();
  lose.nodes.shrink_to_fit();
  lose.parents.clear();
  lose.parents.shrink_to_fit();
  --num_classes_;
  return true;
}

bool EGraph::merge(EClassId a, EClassId b) {
  if (!unite(a, b))
    return false;
  dirty_ = true;
  return true;
}

void EGraph::insert_node_raw(EClassId cls, ENode n) {
  cls = find_mut(cls);
  for (EClassId c : n.children())
    check_id(c);
  classes_[cls.value].nodes.push_back(n);
  dirty_ = true;
}

void EGraph::rebuild() {
  if (!dirty_)
    return;

  // Full-scan congruence fixpoint: re-canonicalize every node, rebuild the
  // hashcons, and merge any two classes holding congruent nodes; repeat until
  // nothing moves. Batched per saturation iteration, so the scans amortize.
  bool changed = true;
  while (changed) {
    changed = false;
    hashcons_.clear();
    for (std::uint32_t i = 0; i < uf_.size(); ++i) {
      if (uf_[i] != i)
        continue;
      auto& nodes = classes_[i].nodes;
      for (ENode& n : nodes)
        n = canonical(n);
      std::sort(nodes.begin(), nodes.end());
      nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    }
    std::vector<std::pair<EClassId, EClassId>> pending;
    for (std::uint32_t i = 0; i < uf_.size(); ++i) {
      if (uf_[i] != i)
        continue;
      for (const ENode& n : classes_[i].nodes) {
        auto [it, inserted] = hashcons_.try_emplace(n, EClassId{i});
        if (!inserted && it->second != EClassId{i})
          pending.emplace_back(it->second, EClassId{i});
      }
    }
    for (auto [a, b] : pending)
      changed |= unite(a, b);
  }
  rebuild_parents();
  dirty_ = false;
}

void EGraph::rebuild_parents() {
  for (std::uint32_t i = 0; i < uf_.size(); ++i) {
    classes_[i].parents.clear();
    if (uf_[i] != i)
      classes_[i].nodes.clear();
  }
  for (std::uint32_t i = 0; i < uf_.size(); ++i) {
    if (uf_[i] != i)
      continue;
    for (const ENode& n : classes_[i].nodes) {
      EClassId prev{};
      for (EClassId c : n.children()) {
        if (c == prev)
          continue;
        classes_[c.value].parents.emplace_back(n, EClassId{i});
        prev = c;
      }
    }
  }
}

void EGraph::freeze() {
  rebuild();
  for (std::uint32_t i = 0; i < uf_.size(); ++i)
    uf_[i] = find_mut(EClassId{i}).value;
  for (EClassId& r : roots_)
    r = find(r);
}

std::span<const ENode> EGraph::class_nodes(EClassId id) const {
  EClassId root = find(id);
  return classes_[root.value].nodes;
}

std::span<const std::pair<ENode, EClassId>> EGraph::parents(EClassId id) const {
  EClassId root = find(id);
  return classes_[root.value].parents;
}

std::vector<EClassId> EGraph::class_ids() const {
  std::vector<EClassId> ids;
  ids.reserve(num_classes_);
  for (std::uint32_t i = 0; i < uf_.size(); ++i)
    if (uf_[i] == i)
      ids.push_back(EClassId{i});
  return ids;
}

} // namespace eqsat
