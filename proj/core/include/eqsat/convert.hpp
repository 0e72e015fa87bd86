#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqsat/circuit.hpp"
#include "eqsat/egraph.hpp"
#include "eqsat/selection.hpp"

namespace eqsat {

/// The JSON interchange format bridging circuits and e-graphs. Ops are
/// spelled "and" | "or" | "not" | "var:<name>" | "const:<bit>"; node and
/// class ids are opaque strings. See docs/format.md for the full schema.
struct SerializedEGraph {
  struct Node {
    std::string op;
    std::vector<std::string> children; // class ids
  };
  struct Meta {
    std::string name;
    std::string generator = "eqsat";
    std::string version = "1";
    std::vector<std::string> outputs; // optional output names, aligned with roots
    std::vector<std::string> inputs;  // optional input order for circuit emission
  };

  std::map<std::string, Node> nodes;
  std::map<std::string, std::vector<std::string>> classes;
  std::vector<std::string> roots;
  Meta meta;
  /// Optional embedded selection: class id -> node id.
  std::map<std::string, std::string> selection;
};

/// Side table produced by deserialize when callers need to refer back to the
/// file's ids (embedded selections, tooling).
struct SerializedIdMap {
  std::map<std::string, EClassId> class_of; // file class id -> canonical class
};

/// Direct DAG-to-DAG conversion. One e-class per distinct circuit node;
/// shared fan-out maps to shared classes (no duplication). Roots are the
/// output classes in output order, also stored in the graph.
std::pair<EGraph, std::vector<EClassId>> circuit_to_egraph(const Circuit& c);

SerializedEGraph serialize(const EGraph& g);
/// Throws SchemaError (naming the offending id) on dangling children,
/// duplicated node ids, unknown ops or arity mismatches.
EGraph deserialize(const SerializedEGraph& s, SerializedIdMap* ids = nullptr);

/// Resolve an embedded selection against the deserialized graph.
Selection selection_from_serialized(const EGraph& g, const SerializedEGraph& s,
                                    const SerializedIdMap& ids);

std::string to_json(const SerializedEGraph& s);
SerializedEGraph from_json(std::string_view text);

/// Materialize the circuit induced by a selection. `output_names` /
/// `input_names` optionally fix the interface names (defaults: y<i> for
/// outputs, declared order of first use for inputs).
Circuit selection_to_circuit(const EGraph& g, const Selection& sel,
                             std::span<const EClassId> roots,
                             std::span<const std::string> output_names = {},
                             std::span<const std::string> input_names = {});

/// "Choose the sole member" — only defined on pre-rewriting graphs; throws
/// SemanticError if any class has more than one node.
Selection identity_selection(const EGraph& g);

} // namespace eqsat
