#include "eqsat/circuit.hpp"

#include <algorithm>

namespace eqsat {

const std::string* Circuit::node_name(NodeRef r) const {
  auto it = node_names_.find(r);
  return it == node_names_.end() ? nullptr : &it->second;
}

CircuitBuilder::CircuitBuilder(std::string design_name) {
  circuit_.name_ = std::move(design_name);
}

std::size_t CircuitBuilder::NodeKeyHash::operator()(const NodeKey& k) const {
  std::uint64_t h = static_cast<std::uint64_t>(k.n.kind);
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  mix(k.n.fanin0);
  mix(k.n.fanin1);
  mix(k.n.payload);
  return static_cast<std::size_t>(h);
}

void CircuitBuilder::check_ref(NodeRef r) const {
  if (r >= circuit_.nodes_.size())
    throw SemanticError("node reference out of range");
}

NodeRef CircuitBuilder::intern(CircuitNode n) {
  auto [it, inserted] = strash_.try_emplace(NodeKey{n}, 0);
  if (inserted) {
    it->second = static_cast<NodeRef>(circuit_.nodes_.size());
    circuit_.nodes_.push_back(n);
  }
  return it->second;
}

NodeRef CircuitBuilder::add_input(std::string name) {
  if (signal_names_.contains(name))
    throw SemanticError("duplicate signal name '" + name + "'");
  auto index = static_cast<std::uint32_t>(circuit_.inputs_.size());
  NodeRef r = intern({NodeKind::Input, 0, 0, index});
  circuit_.inputs_.push_back(name);
  circuit_.node_names_.emplace(r, name);
  signal_names_.emplace(std::move(name), r);
  return r;
}

NodeRef CircuitBuilder::constant(bool bit) {
  return intern({NodeKind::Const, 0, 0, bit ? 1u : 0u});
}

NodeRef CircuitBuilder::make_not(NodeRef a) {
  check_ref(a);
  return intern({NodeKind::Not, a, 0, 0});
}

NodeRef CircuitBuilder::make_and(NodeRef a, NodeRef b) {
  check_ref(a);
  check_ref(b);
  return intern({NodeKind::And, a, b, 0});
}

NodeRef CircuitBuilder::make_or(NodeRef a, NodeRef b) {
  check_ref(a);
  check_ref(b);
  return intern({NodeKind::Or, a, b, 0});
}

void CircuitBuilder::set_node_name(NodeRef r, std::string name) {
  check_ref(r);
  if (circuit_.node_names_.contains(r))
    return;
  auto it = signal_names_.find(name);
  if (it != signal_names_.end()) {
    if (it->second != r)
      throw SemanticError("duplicate signal name '" + name + "'");
    return;
  }
  circuit_.node_names_.emplace(r, name);
  signal_names_.emplace(std::move(name), r);
}

void CircuitBuilder::add_output(std::string name, NodeRef r) {
  check_ref(r);
  if (!output_names_.insert(name).second)
    throw SemanticError("duplicate output name '" + name + "'");
  // An output may reuse an input's name only when it is that very input;
  // anything else would not survive an emit/parse round trip.
  auto it = signal_names_.find(name);
  if (it != signal_names_.end() && it->second != r &&
      circuit_.nodes_[it->second].kind == NodeKind::Input)
    throw SemanticError("output '" + name + "' collides with an input name");
  circuit_.outputs_.emplace_back(std::move(name), r);
}

Circuit CircuitBuilder::build() {
  return std::move(circuit_);
}

CircuitStats stats(const Circuit& c) {
  CircuitStats s;
  s.input_count = c.inputs().size();
  s.output_count = c.outputs().size();
  std::vector<std::size_t> depth(c.size(), 0);
  for (NodeRef r = 0; r < c.size(); ++r) {
    const CircuitNode& n = c.node(r);
    switch (n.kind) {
    case NodeKind::Input:
    case NodeKind::Const:
      break;
    case NodeKind::Not:
      ++s.node_count;
      depth[r] = depth[n.fanin0] + 1;
      break;
    case NodeKind::And:
    case NodeKind::Or:
      ++s.node_count;
      depth[r] = std::max(depth[n.fanin0], depth[n.fanin1]) + 1;
      break;
    }
  }
  for (const auto& [name, r] : c.outputs())
    s.depth = std::max(s.depth, depth[r]);
  return s;
}

std::vector<std::uint64_t> simulate_words(const Circuit& c,
                                          std::span<const std::uint64_t> input_words) {
  std::vector<std::uint64_t> value(c.size(), 0);
  for (NodeRef r = 0; r < c.size(); ++r) {
    const CircuitNode& n = c.node(r);
    switch (n.kind) {
    case NodeKind::Input:
      value[r] = input_words[n.payload];
      break;
    case NodeKind::Const:
      value[r] = n.payload ? ~0ull : 0ull;
      break;
    case NodeKind::Not:
      value[r] = ~value[n.fanin0];
      break;
    case NodeKind::And:
      value[r] = value[n.fanin0] & value[n.fanin1];
      break;
    case NodeKind::Or:
      value[r] = value[n.fanin0] | value[n.fanin1];
      break;
    }
  }
  std::vector<std::uint64_t> out;
  out.reserve(c.outputs().size());
  for (const auto& [name, r] : c.outputs())
    out.push_back(value[r]);
  return out;
}

std::vector<bool> simulate(const Circuit& c,
                           const std::unordered_map<std::string, bool>& assignment) {
  std::vector<std::uint64_t> words(c.inputs().size(), 0);
  for (std::size_t i = 0; i < c.inputs().size(); ++i) {
    auto it = assignment.find(c.inputs()[i]);
    if (it == assignment.end())
      throw MissingInput(c.inputs()[i]);
    words[i] = it->second ? ~0ull : 0ull;
  }
  std::vector<std::uint64_t> out = simulate_words(c, words);
  std::vector<bool> bits(out.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    bits[i] = (out[i] & 1ull) != 0;
  return bits;
}

} // namespace eqsat
