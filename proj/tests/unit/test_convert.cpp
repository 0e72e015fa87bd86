#include "doctest.h"

#include "eqsat/convert.hpp"
#include "eqsat/extract.hpp"
#include "eqsat/generator.hpp"
#include "eqsat/rewrite.hpp"
#include "oracles.hpp"

using namespace eqsat;

TEST_CASE("circuit_to_egraph: single AND") {
  Circuit c = parse_equation("INORDER = a b; OUTORDER = y; y = a * b;");
  auto [g, roots] = circuit_to_egraph(c);
  CHECK(g.num_classes() == 3);
  CHECK(g.num_nodes() == 3);
  REQUIRE(roots.size() == 1);
  auto nodes = g.class_nodes(roots[0]);
  REQUIRE(nodes.size() == 1);
  CHECK(nodes[0].op() == Op::And);
}

TEST_CASE("circuit_to_egraph: shared fan-out maps to one class") {
  Circuit c = parse_equation(
      "INORDER = a b c d; OUTORDER = y z; t = a * b; y = t + c; z = t * d;");
  auto [g, roots] = circuit_to_egraph(c);
  // 4 vars + t + y + z = 7 distinct nodes and classes, t referenced twice
  CHECK(g.num_nodes() == 7);
  EClassId t = g.add(ENode::make_and(g.add_var("a"), g.add_var("b")));
  CHECK(g.parents(t).size() == 2);

  // textual duplication of a*b collapses into the same class
  Circuit dup = parse_equation("INORDER = a b; OUTORDER = y; y = (a*b)+(a*b);");
  auto [g2, roots2] = circuit_to_egraph(dup);
  CHECK(g2.num_nodes() == 4); // a, b, a*b, or
}

TEST_CASE("circuit_to_egraph: node count equals gates plus leaves") {
  GeneratorConfig gen;
  gen.gate_count = 5000;
  gen.input_count = 32;
  gen.seed = 3;
  Circuit c = random_circuit(gen);
  auto [g, roots] = circuit_to_egraph(c);
  CHECK(g.num_nodes() == c.size());
  CHECK(g.num_classes() == c.size());
}

TEST_CASE("serialize: initial serialization has one node per class") {
  Circuit c = parse_equation("INORDER = a b c; OUTORDER = y; y = (a*b)+(a*c);");
  auto [g, roots] = circuit_to_egraph(c);
  SerializedEGraph s = serialize(g);
  CHECK(s.classes.size() == s.nodes.size());
  for (const auto& [cls, members] : s.classes)
    CHECK(members.size() == 1);
  CHECK(s.roots.size() == 1);
}

TEST_CASE("serialize/deserialize: round trip preserves shape") {
  Circuit c = parse_equation("INORDER = a b c; OUTORDER = y; y = (a*b)+(a*c);");
  auto [g, roots] = circuit_to_egraph(c);
  RunnerConfig cfg;
  cfg.rules = default_rules();
  run_saturation(g, cfg);
  g.freeze();

  SerializedEGraph s = serialize(g);
  EGraph back = deserialize(s);
  CHECK(back.num_nodes() == g.num_nodes());
  CHECK(back.num_classes() == g.num_classes());
  CHECK(back.roots().size() == g.roots().size());

  // a second round trip is textually stable
  CHECK(to_json(serialize(back)) == to_json(s));
}

TEST_CASE("property: serialization round-trips random saturated graphs") {
  // ids may be renamed by a round trip, so compare renaming-invariant shape:
  // class count, node count, the class-size multiset and the op multiset
  auto signature = [](const EGraph& g) {
    std::multiset<std::size_t> class_sizes;
    std::multiset<std::string> ops;
    for (EClassId cls : g.class_ids()) {
      class_sizes.insert(g.class_nodes(cls).size());
      for (const ENode& n : g.class_nodes(cls)) {
        std::string op{op_name(n.op())};
        if (n.op() == Op::Var)
          op += ":" + g.symbol_name(n.symbol());
        ops.insert(op);
      }
    }
    return std::make_pair(class_sizes, ops);
  };
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GeneratorConfig gen;
    gen.gate_count = 10;
    gen.input_count = 5;
    gen.seed = seed;
    auto sat = eqsat::testing::make_saturated(gen, 2, 2000);
    std::string json = to_json(serialize(sat.graph));
    EGraph back = deserialize(from_json(json));
    CHECK(back.num_nodes() == sat.graph.num_nodes());
    CHECK(back.num_classes() == sat.graph.num_classes());
    CHECK(back.roots().size() == sat.graph.roots().size());
    CHECK(signature(back) == signature(sat.graph));
  }
}

TEST_CASE("from_json/to_json: field-level round trip") {
  Circuit c = parse_equation("INORDER = a b; OUTORDER = y; y = !(a + b);");
  auto [g, roots] = circuit_to_egraph(c);
  SerializedEGraph s = serialize(g);
  s.meta.name = "nor2";
  s.meta.outputs = {"y"};
  SerializedEGraph parsed = from_json(to_json(s));
  CHECK(parsed.nodes.size() == s.nodes.size());
  CHECK(parsed.classes.size() == s.classes.size());
  CHECK(parsed.roots == s.roots);
  CHECK(parsed.meta.name == "nor2");
  CHECK(parsed.meta.outputs == s.meta.outputs);
}

TEST_CASE("deserialize: schema violations name the offender") {
  Circuit c = parse_equation("INORDER = a b; OUTORDER = y; y = a * b;");
  auto [g, roots] = circuit_to_egraph(c);
  SerializedEGraph good = serialize(g);

  SUBCASE("dangling child class") {
    SerializedEGraph bad = good;
    bad.nodes["n2"].children = {"c0", "c_missing"};
    try {
      deserialize(bad);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.where() == "c_missing");
    }
  }
  SUBCASE("node in two classes") {
    SerializedEGraph bad = good;
    bad.classes["c0"].push_back("n2");
    CHECK_THROWS_AS(deserialize(bad), SchemaError);
  }
  SUBCASE("node in no class") {
    SerializedEGraph bad = good;
    bad.nodes.emplace("n99", SerializedEGraph::Node{"var:zz", {}});
    CHECK_THROWS_AS(deserialize(bad), SchemaError);
  }
  SUBCASE("unknown op") {
    SerializedEGraph bad = good;
    bad.nodes["n2"].op = "xor";
    CHECK_THROWS_AS(deserialize(bad), SchemaError);
  }
  SUBCASE("arity mismatch") {
    SerializedEGraph bad = good;
    bad.nodes["n2"].op = "not";
    CHECK_THROWS_AS(deserialize(bad), SchemaError);
  }
  SUBCASE("missing root") {
    SerializedEGraph bad = good;
    bad.roots = {"c404"};
    CHECK_THROWS_AS(deserialize(bad), SchemaError);
  }
  SUBCASE("empty class") {
    SerializedEGraph bad = good;
    bad.classes.emplace("cempty", std::vector<std::string>{});
    CHECK_THROWS_AS(deserialize(bad), SchemaError);
  }
}

TEST_CASE("identity pipeline: circuit -> egraph -> identity selection -> circuit") {
  const char* samples[] = {
      "INORDER = a b; OUTORDER = y; y = a * b;",
      "INORDER = a b c; OUTORDER = y z; t = a * b; y = t + c; z = !t;",
      "INORDER = a; OUTORDER = y; y = a;",
      "INORDER = a b; OUTORDER = y; y = a * 1 + b * 0;",
  };
  for (const char* text : samples) {
    Circuit original = parse_equation(text);
    auto [g, roots] = circuit_to_egraph(original);
    Selection sel = identity_selection(g);
    std::vector<std::string> outs;
    for (const auto& [name, r] : original.outputs())
      outs.push_back(name);
    std::vector<std::string> ins(original.inputs().begin(), original.inputs().end());
    Circuit back = selection_to_circuit(g, sel, roots, outs, ins);
    CHECK(stats(back).node_count == stats(original).node_count);
    CHECK(stats(back).depth == stats(original).depth);
    CHECK(eqsat::testing::same_function(original, back));
  }
}

TEST_CASE("identity selection requires singleton classes") {
  Circuit c = parse_equation("INORDER = a b; OUTORDER = y; y = a * b;");
  auto [g, roots] = circuit_to_egraph(c);
  RunnerConfig cfg;
  cfg.rules = default_rules();
  cfg.max_iterations = 1;
  run_saturation(g, cfg);
  g.freeze();
  CHECK_THROWS_AS(identity_selection(g), SemanticError);
}

TEST_CASE("selection_to_circuit: factored choice yields the 2-gate form") {
  Circuit c = parse_equation("INORDER = a b c; OUTORDER = y; y = (a*b)+(a*c);");
  auto [g, roots] = circuit_to_egraph(c);
  RunnerConfig cfg;
  cfg.rules = default_rules();
  run_saturation(g, cfg);
  g.freeze();

  ExtractResult best = brute_force_extract(g, g.roots(), CostFunction::sum());
  CHECK(best.total == doctest::Approx(2));
  Circuit out = selection_to_circuit(g, best.selection, g.roots(),
                                     std::vector<std::string>{"y"});
  CHECK(stats(out).node_count == 2);
}

TEST_CASE("selection_to_circuit: incomplete selection") {
  Circuit c = parse_equation("INORDER = a b; OUTORDER = y; y = a * b;");
  auto [g, roots] = circuit_to_egraph(c);
  Selection sel = identity_selection(g);
  // drop one reachable class
  Selection incomplete;
  bool skipped_one = false;
  for (EClassId cls : g.class_ids()) {
    if (!skipped_one && g.class_nodes(cls)[0].op() == Op::Var) {
      skipped_one = true;
      continue;
    }
    incomplete.choose(cls, g.class_nodes(cls)[0]);
  }
  CHECK_THROWS_AS(
      selection_to_circuit(g, incomplete, roots, std::vector<std::string>{"y"}),
      IncompleteSelection);
}

TEST_CASE("selection_to_circuit: cyclic selection") {
  EGraph g;
  EClassId a = g.add_var("a");
  EClassId cyc = g.reserve_class();
  g.insert_node_raw(cyc, ENode::make_and(cyc, a));
  g.rebuild();
  g.freeze();
  Selection sel;
  sel.choose(g.find(cyc), g.class_nodes(cyc)[0]);
  sel.choose(g.find(a), g.class_nodes(a)[0]);
  std::vector<EClassId> roots{g.find(cyc)};
  CHECK_THROWS_AS(selection_to_circuit(g, sel, roots, {}), CyclicSelection);
}
