#include "doctest.h"

#include <filesystem>
#include <memory>

#include "eqsat/convert.hpp"
#include "eqsat/cost_model.hpp"
#include "eqsat/extract.hpp"
#include "eqsat/generator.hpp"
#include "eqsat/pipeline.hpp"
#include "eqsat/rewrite.hpp"
#include "oracles.hpp"

using namespace eqsat;

TEST_CASE("size and depth costs: worked examples") {
  CHECK(size_cost(parse_equation("INORDER = a; OUTORDER = y; y = a;")) == 0);
  CHECK(depth_cost(parse_equation("INORDER = a; OUTORDER = y; y = a;")) == 0);
  CHECK(size_cost(parse_equation("INORDER = a b c; OUTORDER = y; y = (a*b)+(a*c);")) == 3);
  CHECK(size_cost(parse_equation("INORDER = a b c; OUTORDER = y; y = a*(b+c);")) == 2);
}

TEST_CASE("depth cost is definitionally stats().depth") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorConfig gen;
    gen.gate_count = 30;
    gen.input_count = 6;
    gen.seed = seed;
    Circuit c = random_circuit(gen);
    CHECK(depth_cost(c) == static_cast<double>(stats(c).depth));
  }
}

TEST_CASE("external evaluator: happy path") {
  ExternalEvaluatorSpec spec;
  spec.command = "cat {} > /dev/null; echo \"delay 42.5\"";
  spec.parse_regex = "delay ([0-9.]+)";
  Circuit c = parse_equation("INORDER = a b; OUTORDER = y; y = a * b;");
  CHECK(external_evaluate(spec, c) == doctest::Approx(42.5));
}

TEST_CASE("external evaluator: failure modes") {
  Circuit c = parse_equation("INORDER = a b; OUTORDER = y; y = a * b;");

  SUBCASE("nonzero exit") {
    ExternalEvaluatorSpec spec;
    spec.command = "cat {} > /dev/null; exit 3";
    try {
      external_evaluate(spec, c);
      FAIL("expected EvaluatorFailure");
    } catch (const EvaluatorFailure& e) {
      CHECK(e.reason() == EvaluatorFailure::Reason::NonzeroExit);
    }
  }
  SUBCASE("no match") {
    ExternalEvaluatorSpec spec;
    spec.command = "echo {} > /dev/null; echo nothing-here";
    spec.parse_regex = "delay ([0-9.]+)";
    try {
      external_evaluate(spec, c);
      FAIL("expected EvaluatorFailure");
    } catch (const EvaluatorFailure& e) {
      CHECK(e.reason() == EvaluatorFailure::Reason::NoMatch);
      CHECK(e.output().find("nothing-here") != std::string::npos);
    }
  }
  SUBCASE("captured text is not a number") {
    ExternalEvaluatorSpec spec;
    spec.command = "echo {} > /dev/null; echo 'cost = oops'";
    spec.parse_regex = "cost = (\\S+)";
    try {
      external_evaluate(spec, c);
      FAIL("expected EvaluatorFailure");
    } catch (const EvaluatorFailure& e) {
      CHECK(e.reason() == EvaluatorFailure::Reason::NotANumber);
    }
  }
  SUBCASE("timeout") {
    ExternalEvaluatorSpec spec;
    spec.command = "cat {} > /dev/null; sleep 5; echo 1";
    spec.timeout = std::chrono::duration<double>(0.2);
    try {
      external_evaluate(spec, c);
      FAIL("expected EvaluatorFailure");
    } catch (const EvaluatorFailure& e) {
      CHECK(e.reason() == EvaluatorFailure::Reason::Timeout);
    }
  }
  SUBCASE("spec validation") {
    ExternalEvaluatorSpec spec;
    spec.command = "echo 1"; // no placeholder
    CHECK_THROWS_AS(spec.validate(), SemanticError);
    spec.command = "echo {} {}";
    CHECK_THROWS_AS(spec.validate(), SemanticError);
    spec.command = "echo {}";
    spec.parse_regex = "([0-9]+) ([0-9]+)"; // two capture groups
    CHECK_THROWS_AS(spec.validate(), SemanticError);
  }
}

TEST_CASE("external evaluator: temporary file is cleaned up") {
  namespace fs = std::filesystem;
  fs::path marker = fs::temp_directory_path() / "eqsat_test_seen_path";
  ExternalEvaluatorSpec spec;
  spec.command = "echo {} > " + marker.string() + "; echo 7";
  Circuit c = parse_equation("INORDER = a; OUTORDER = y; y = !a;");
  CHECK(external_evaluate(spec, c) == doctest::Approx(7));
  std::string recorded = read_file(marker.string());
  // strip quotes/newline
  std::string path;
  for (char ch : recorded)
    if (ch != '\'' && ch != '\n')
      path += ch;
  CHECK_FALSE(fs::exists(path));
  fs::remove(marker);
}

TEST_CASE("external evaluator: a gate-counting script agrees with size_cost") {
  // gates are exactly the assignment lines carrying an operator
  ExternalEvaluatorSpec spec;
  spec.command = "grep -cE '[*+!]' {} || true";
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorConfig gen;
    gen.gate_count = 12;
    gen.input_count = 4;
    gen.seed = seed;
    Circuit c = random_circuit(gen);
    CHECK(external_evaluate(spec, c) == doctest::Approx(size_cost(c)));
  }
}

TEST_CASE("registry: builtin names resolve, duplicates and unknowns fail") {
  ModelRegistry registry = ModelRegistry::with_builtins();
  CHECK(registry.resolve("size")->name() == "size");
  CHECK(registry.resolve("depth")->name() == "depth");
  CHECK_THROWS_AS(registry.register_model(std::make_shared<SizeCostModel>()),
                  DuplicateName);
  try {
    registry.resolve("gnn");
    FAIL("expected UnknownModel");
  } catch (const UnknownModel& e) {
    CHECK(std::string(e.what()).find("size") != std::string::npos);
    CHECK(std::string(e.what()).find("depth") != std::string::npos);
  }
}

namespace {

class AffineModel final : public CostModel {
public:
  double evaluate(const Circuit& c) const override {
    return 2.0 * size_cost(c) + depth_cost(c);
  }
  std::string name() const override { return "affine"; }
};

} // namespace

TEST_CASE("registry: a user model drives annealing") {
  ModelRegistry registry = ModelRegistry::with_builtins();
  registry.register_model(std::make_shared<AffineModel>());

  Circuit c = parse_equation("INORDER = a b c; OUTORDER = y; y = (a*b)+(a*c);");
  auto [g, roots] = circuit_to_egraph(c);
  RunnerConfig rc;
  rc.rules = default_rules();
  run_saturation(g, rc);
  g.freeze();

  SAConfig cfg;
  cfg.seed = 4;
  AnnealResult r =
      anneal(g, g.roots(), CostFunction::sum(), *registry.resolve("affine"), cfg);
  // factored form: 2 gates, depth 2 -> affine cost 6
  CHECK(r.best_cost == doctest::Approx(6));
}
