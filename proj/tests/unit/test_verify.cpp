#include "doctest.h"

#include "eqsat/verify.hpp"
#include "oracles.hpp"

using namespace eqsat;

TEST_CASE("equivalence: commutativity pair") {
  Circuit a = parse_equation("INORDER = a b; OUTORDER = y; y = a * b;");
  Circuit b = parse_equation("INORDER = a b; OUTORDER = y; y = b * a;");
  EquivalenceReport r = check_equivalence(a, b);
  CHECK(r.verdict == Verdict::Equivalent);
  CHECK(r.method == VerifyMethod::Exhaustive);
  CHECK(r.vectors_tested == 4);
}

TEST_CASE("equivalence: consensus pair over all 8 assignments") {
  Circuit lhs = parse_equation(
      "INORDER = a b c; OUTORDER = y; y = (a*b) + ((!a)*c) + (b*c);");
  Circuit rhs = parse_equation("INORDER = a b c; OUTORDER = y; y = (a*b) + ((!a)*c);");
  EquivalenceReport r = check_equivalence(lhs, rhs);
  CHECK(r.verdict == Verdict::Equivalent);
  CHECK(r.vectors_tested == 8);
}

TEST_CASE("inequivalence: AND vs OR with the expected counterexample") {
  Circuit a = parse_equation("INORDER = a b; OUTORDER = y; y = a * b;");
  Circuit b = parse_equation("INORDER = a b; OUTORDER = y; y = a + b;");
  EquivalenceReport r = check_equivalence(a, b);
  REQUIRE(r.verdict == Verdict::Inequivalent);
  CHECK(r.counterexample.at("a") == true);
  CHECK(r.counterexample.at("b") == false);

  // the counterexample is self-verifying through simulate()
  std::unordered_map<std::string, bool> assignment(r.counterexample.begin(),
                                                   r.counterexample.end());
  CHECK(simulate(a, assignment)[0] != simulate(b, assignment)[0]);
}

TEST_CASE("interface mismatch") {
  Circuit a = parse_equation("INORDER = a b; OUTORDER = y; y = a * b;");
  Circuit c = parse_equation("INORDER = a c; OUTORDER = y; y = a * c;");
  CHECK_THROWS_AS(check_equivalence(a, c), InterfaceMismatch);
  Circuit d = parse_equation("INORDER = a b; OUTORDER = z; z = a * b;");
  CHECK_THROWS_AS(check_equivalence(a, d), InterfaceMismatch);
}

TEST_CASE("outputs are matched by name, not position") {
  Circuit a = parse_equation("INORDER = a b; OUTORDER = y z; y = a * b; z = a + b;");
  Circuit b = parse_equation("INORDER = a b; OUTORDER = z y; z = a + b; y = b * a;");
  CHECK(check_equivalence(a, b).verdict == Verdict::Equivalent);
}

namespace {

std::string wide_or_chain(std::size_t inputs) {
  std::string in = "INORDER =";
  for (std::size_t i = 0; i < inputs; ++i)
    in += fmt::format(" x{}", i);
  in += "; OUTORDER = y;\ny = x0";
  for (std::size_t i = 1; i < inputs; ++i)
    in += fmt::format(" + x{}", i);
  in += ";";
  return in;
}

} // namespace

TEST_CASE("probabilistic mode beyond the exhaustive limit") {
  // 20 inputs: identical functions can only get the sampled verdict
  Circuit a = parse_equation(wide_or_chain(20));
  Circuit b = parse_equation(wide_or_chain(20));
  EquivalenceReport r = check_equivalence(a, b, 16, 2000, 42);
  CHECK(r.verdict == Verdict::ProbablyEquivalent);
  CHECK(r.method == VerifyMethod::RandomVectors);
  CHECK(r.vectors_tested == 2000);
}

TEST_CASE("random vectors still catch gross inequivalence") {
  std::string in = "INORDER =";
  for (int i = 0; i < 20; ++i)
    in += fmt::format(" x{}", i);
  std::string ors = in + "; OUTORDER = y;\ny = x0";
  std::string ands = in + "; OUTORDER = y;\ny = x0";
  for (int i = 1; i < 20; ++i) {
    ors += fmt::format(" + x{}", i);
    ands += fmt::format(" * x{}", i);
  }
  Circuit a = parse_equation(ors + ";");
  Circuit b = parse_equation(ands + ";");
  EquivalenceReport r = check_equivalence(a, b, 16, 10000, 1);
  REQUIRE(r.verdict == Verdict::Inequivalent);
  std::unordered_map<std::string, bool> assignment(r.counterexample.begin(),
                                                   r.counterexample.end());
  CHECK(simulate(a, assignment)[0] != simulate(b, assignment)[0]);
}

TEST_CASE("exhaustive limit is honored") {
  Circuit a = parse_equation("INORDER = a b c d; OUTORDER = y; y = ((a*b)*c)*d;");
  Circuit b = parse_equation("INORDER = a b c d; OUTORDER = y; y = a*(b*(c*d));");
  EquivalenceReport exhaustive = check_equivalence(a, b, 16, 100, 0);
  CHECK(exhaustive.method == VerifyMethod::Exhaustive);
  EquivalenceReport sampled = check_equivalence(a, b, 3, 100, 0);
  CHECK(sampled.method == VerifyMethod::RandomVectors);
  CHECK(sampled.verdict == Verdict::ProbablyEquivalent);
}

TEST_CASE("constant circuits with no inputs") {
  Circuit a = parse_equation("OUTORDER = y; y = 1;");
  Circuit b = parse_equation("OUTORDER = y; y = !0;");
  EquivalenceReport r = check_equivalence(a, b);
  CHECK(r.verdict == Verdict::Equivalent);
  CHECK(r.vectors_tested == 1);
}
