#include "eqsat/convert.hpp"

#include <algorithm>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace eqsat {

std::pair<EGraph, std::vector<EClassId>> circuit_to_egraph(const Circuit& c) {
  EGraph g;
  std::vector<EClassId> cls(c.size());
  for (NodeRef r = 0; r < c.size(); ++r) {
    const CircuitNode& n = c.node(r);
    switch (n.kind) {
    case NodeKind::Input:
      cls[r] = g.add_var(c.inputs()[n.payload]);
      break;
    case NodeKind::Const:
      cls[r] = g.add_const(n.payload != 0);
      break;
    case NodeKind::Not:
      cls[r] = g.add(ENode::make_not(cls[n.fanin0]));
      break;
    case NodeKind::And:
      cls[r] = g.add(ENode::make_and(cls[n.fanin0], cls[n.fanin1]));
      break;
    case NodeKind::Or:
      cls[r] = g.add(ENode::make_or(cls[n.fanin0], cls[n.fanin1]));
      break;
    }
  }
  std::vector<EClassId> roots;
  roots.reserve(c.outputs().size());
  for (const auto& [name, r] : c.outputs())
    roots.push_back(cls[r]);
  g.set_roots(roots);
  return {std::move(g), std::move(roots)};
}

namespace {

std::string render_op(const EGraph& g, const ENode& n) {
  switch (n.op()) {
  case Op::Var: return "var:" + g.symbol_name(n.symbol());
  case Op::Const: return n.const_bit() ? "const:1" : "const:0";
  case Op::Not: return "not";
  case Op::And: return "and";
  case Op::Or: return "or";
  }
  return "?";
}

} // namespace

SerializedEGraph serialize(const EGraph& g) {
  SerializedEGraph s;
  std::vector<EClassId> ids = g.class_ids();

  // Dense, deterministic renaming: classes in ascending canonical id order.
  std::unordered_map<std::uint32_t, std::string> class_name;
  class_name.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
    class_name.emplace(ids[i].value, fmt::format("c{}", i));

  std::size_t next_node = 0;
  for (EClassId cls : ids) {
    std::vector<std::string>& members = s.classes[class_name.at(cls.value)];
    for (const ENode& n : g.class_nodes(cls)) {
      std::string node_id = fmt::format("n{}", next_node++);
      SerializedEGraph::Node out;
      out.op = render_op(g, n);
      for (EClassId c : n.children())
        out.children.push_back(class_name.at(g.find(c).value));
      s.nodes.emplace(node_id, std::move(out));
      members.push_back(std::move(node_id));
    }
  }
  for (EClassId r : g.roots())
    s.roots.push_back(class_name.at(g.find(r).value));
  return s;
}

EGraph deserialize(const SerializedEGraph& s, SerializedIdMap* ids) {
  EGraph g;

  std::unordered_map<std::string, EClassId> class_ids;
  class_ids.reserve(s.classes.size());
  for (const auto& [key, members] : s.classes) {
    if (members.empty())
      throw SchemaError("class has no member nodes", key);
    class_ids.emplace(key, g.reserve_class());
  }

  std::unordered_map<std::string, std::string> node_home; // node id -> class id
  for (const auto& [key, members] : s.classes)
    for (const std::string& node_id : members) {
      if (!s.nodes.contains(node_id))
        throw SchemaError("class lists a node id that does not exist", node_id);
      if (!node_home.emplace(node_id, key).second)
        throw SchemaError("node id appears in more than one class", node_id);
    }

  for (const auto& [node_id, node] : s.nodes) {
    auto home = node_home.find(node_id);
    if (home == node_home.end())
      throw SchemaError("node does not belong to any class", node_id);

    std::vector<EClassId> children;
    children.reserve(node.children.size());
    for (const std::string& child : node.children) {
      auto it = class_ids.find(child);
      if (it == class_ids.end())
        throw SchemaError(fmt::format("node '{}' references missing class", node_id),
                          child);
      children.push_back(it->second);
    }

    ENode n = [&]() -> ENode {
      const std::string& op = node.op;
      auto want = [&](std::size_t arity) {
        if (children.size() != arity)
          throw SchemaError(fmt::format("op '{}' expects {} children, got {}", op,
                                        arity, children.size()),
                            node_id);
      };
      if (op.starts_with("var:")) {
        want(0);
        return ENode::var(g.intern_symbol(op.substr(4)));
      }
      if (op == "const:0" || op == "const:1") {
        want(0);
        return ENode::constant(op == "const:1");
      }
      if (op == "not") {
        want(1);
        return ENode::make_not(children[0]);
      }
      if (op == "and") {
        want(2);
        return ENode::make_and(children[0], children[1]);
      }
      if (op == "or") {
        want(2);
        return ENode::make_or(children[0], children[1]);
      }
      throw SchemaError(fmt::format("unknown op '{}'", op), node_id);
    }();
    g.insert_node_raw(class_ids.at(home->second), n);
  }

  std::vector<EClassId> roots;
  for (const std::string& r : s.roots) {
    auto it = class_ids.find(r);
    if (it == class_ids.end())
      throw SchemaError("root references missing class", r);
    roots.push_back(it->second);
  }

  g.rebuild();
  g.set_roots(std::move(roots));
  g.freeze();
  if (ids)
    for (const auto& [key, id] : class_ids)
      ids->class_of.emplace(key, g.find(id));
  return g;
}

Selection selection_from_serialized(const EGraph& g, const SerializedEGraph& s,
                                    const SerializedIdMap& ids) {
  Selection sel;
  for (const auto& [class_key, node_key] : s.selection) {
    auto cls_it = ids.class_of.find(class_key);
    if (cls_it == ids.class_of.end())
      throw SchemaError("selection references missing class", class_key);
    auto node_it = s.nodes.find(node_key);
    if (node_it == s.nodes.end())
      throw SchemaError("selection references missing node", node_key);
    auto members = s.classes.find(class_key);
    if (members == s.classes.end() ||
        std::find(members->second.begin(), members->second.end(), node_key) ==
            members->second.end())
      throw SchemaError("selection node is not a member of its class", node_key);

    // Rebuild the e-node from its serialized form and match it in the class.
    std::vector<EClassId> children;
    for (const std::string& child : node_it->second.children) {
      auto it = ids.class_of.find(child);
      if (it == ids.class_of.end())
        throw SchemaError("selection node child references missing class", child);
      children.push_back(g.find(it->second));
    }
    const std::string& op = node_it->second.op;
    EClassId cls = g.find(cls_it->second);
    const ENode* found = nullptr;
    for (const ENode& n : g.class_nodes(cls)) {
      if (render_op(g, n) != op)
        continue;
      bool same = n.arity() == children.size();
      for (std::size_t i = 0; same && i < children.size(); ++i)
        same = g.find(n.children()[i]) == children[i];
      if (same) {
        found = &n;
        break;
      }
    }
    if (!found)
      throw SchemaError("selection node not found in deserialized class", node_key);
    sel.choose(cls, *found);
  }
  return sel;
}

std::string to_json(const SerializedEGraph& s) {
  // plain (map-backed) json: ordered_json's object insert is linear in the
  // key count, which turns 100k-node graphs quadratic
  nlohmann::json doc;
  doc["meta"] = {{"name", s.meta.name},
                 {"generator", s.meta.generator},
                 {"version", s.meta.version}};
  if (!s.meta.outputs.empty())
    doc["meta"]["outputs"] = s.meta.outputs;
  if (!s.meta.inputs.empty())
    doc["meta"]["inputs"] = s.meta.inputs;
  nlohmann::json nodes = nlohmann::json::object();
  for (const auto& [id, n] : s.nodes)
    nodes.emplace(id, nlohmann::json{{"op", n.op}, {"children", n.children}});
  doc["nodes"] = std::move(nodes);
  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [id, members] : s.classes)
    classes.emplace(id, members);
  doc["classes"] = std::move(classes);
  doc["roots"] = s.roots;
  if (!s.selection.empty()) {
    nlohmann::json sel = nlohmann::json::object();
    for (const auto& [cls, node] : s.selection)
      sel.emplace(cls, node);
    doc["selection"] = std::move(sel);
  }
  return doc.dump(2) + "\n";
}

SerializedEGraph from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what(), "<document>");
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("classes") ||
      !doc.contains("roots"))
    throw SchemaError("document needs nodes, classes and roots", "<document>");

  SerializedEGraph s;
  if (doc.contains("meta") && doc["meta"].is_object()) {
    const auto& meta = doc["meta"];
    s.meta.name = meta.value("name", "");
    s.meta.generator = meta.value("generator", "");
    s.meta.version = meta.value("version", "");
    if (meta.contains("outputs"))
      s.meta.outputs = meta["outputs"].get<std::vector<std::string>>();
    if (meta.contains("inputs"))
      s.meta.inputs = meta["inputs"].get<std::vector<std::string>>();
  }
  if (!doc["nodes"].is_object())
    throw SchemaError("nodes must be an object", "nodes");
  for (const auto& [id, body] : doc["nodes"].items()) {
    if (!body.is_object() || !body.contains("op") || !body.contains("children") ||
        !body["op"].is_string() || !body["children"].is_array())
      throw SchemaError("node needs an op string and a children array", id);
    SerializedEGraph::Node n;
    n.op = body["op"].get<std::string>();
    for (const auto& child : body["children"]) {
      if (!child.is_string())
        throw SchemaError("children must be class-id strings", id);
      n.children.push_back(child.get<std::string>());
    }
    s.nodes.emplace(id, std::move(n));
  }
  if (!doc["classes"].is_object())
    throw SchemaError("classes must be an object", "classes");
  for (const auto& [id, members] : doc["classes"].items()) {
    if (!members.is_array())
      throw SchemaError("class members must be an array of node ids", id);
    s.classes.emplace(id, members.get<std::vector<std::string>>());
  }
  s.roots = doc["roots"].get<std::vector<std::string>>();
  if (doc.contains("selection")) {
    if (!doc["selection"].is_object())
      throw SchemaError("selection must map class ids to node ids", "selection");
    for (const auto& [cls, node] : doc["selection"].items())
      s.selection.emplace(cls, node.get<std::string>());
  }
  return s;
}

Circuit selection_to_circuit(const EGraph& g, const Selection& sel,
                             std::span<const EClassId> roots,
                             std::span<const std::string> output_names,
                             std::span<const std::string> input_names) {
  CircuitBuilder builder;
  std::unordered_map<std::string, NodeRef> input_refs;
  for (const std::string& name : input_names)
    input_refs.emplace(name, builder.add_input(name));

  enum class State : std::uint8_t { Visiting, Done };
  std::unordered_map<std::uint32_t, State> state;
  std::unordered_map<std::uint32_t, NodeRef> built;

  // Iterative DFS; a Visiting hit means the chosen nodes close a cycle.
  auto build_from = [&](EClassId root) {
    struct Frame {
      EClassId cls;
      bool expanded;
    };
    std::vector<Frame> stack{{g.find(root), false}};
    while (!stack.empty()) {
      auto [cls, expanded] = stack.back();
      stack.pop_back();
      if (!expanded && built.contains(cls.value))
        continue;
      const ENode* n = sel.chosen(cls);
      if (!n)
        throw IncompleteSelection(
            fmt::format("selection has no choice for reachable class {}", cls.value));
      if (!expanded) {
        auto [it, inserted] = state.try_emplace(cls.value, State::Visiting);
        if (!inserted && it->second == State::Visiting)
          throw CyclicSelection(
              fmt::format("selection induces a cycle through class {}", cls.value));
        if (!inserted)
          continue;
        stack.push_back({cls, true});
        for (EClassId c : n->children())
          stack.push_back({g.find(c), false});
        continue;
      }
      NodeRef r = 0;
      switch (n->op()) {
      case Op::Var: {
        const std::string& name = g.symbol_name(n->symbol());
        auto it = input_refs.find(name);
        if (it == input_refs.end())
          it = input_refs.emplace(name, builder.add_input(name)).first;
        r = it->second;
        break;
      }
      case Op::Const:
        r = builder.constant(n->const_bit());
        break;
      case Op::Not:
        r = builder.make_not(built.at(g.find(n->children()[0]).value));
        break;
      case Op::And:
        r = builder.make_and(built.at(g.find(n->children()[0]).value),
                             built.at(g.find(n->children()[1]).value));
        break;
      case Op::Or:
        r = builder.make_or(built.at(g.find(n->children()[0]).value),
                            built.at(g.find(n->children()[1]).value));
        break;
      }
      built.emplace(cls.value, r);
      state[cls.value] = State::Done;
    }
  };

  for (std::size_t i = 0; i < roots.size(); ++i) {
    build_from(roots[i]);
    std::string name = i < output_names.size() ? output_names[i] : fmt::format("y{}", i);
    builder.add_output(std::move(name), built.at(g.find(roots[i]).value));
  }
  return builder.build();
}

Selection identity_selection(const EGraph& g) {
  Selection sel;
  for (EClassId cls : g.class_ids()) {
    auto nodes = g.class_nodes(cls);
    if (nodes.size() != 1)
      throw SemanticError(fmt::format(
          "class {} has {} members; identity selection needs a pre-rewriting graph "
          "(or an explicit selection)",
          cls.value, nodes.size()));
    sel.choose(cls, nodes[0]);
  }
  return sel;
}

} // namespace eqsat
