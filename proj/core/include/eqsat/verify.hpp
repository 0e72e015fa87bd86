#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "eqsat/circuit.hpp"

namespace eqsat {

enum class Verdict { Equivalent, Inequivalent, ProbablyEquivalent };
enum class VerifyMethod { Exhaustive, RandomVectors };

std::string_view verdict_name(Verdict v);

struct EquivalenceReport {
  Verdict verdict = Verdict::Equivalent;
  VerifyMethod method = VerifyMethod::Exhaustive;
  bool inputs_matched = true;
  std::uint64_t vectors_tested = 0;
  /// Set iff Inequivalent; simulate() on both circuits confirms it.
  std::map<std::string, bool> counterexample;
};

/// Functional equivalence by simulation: exhaustive truth-table comparison up
/// to max_exhaustive_inputs inputs (64 assignments per pass), seeded random
/// vectors beyond that. Both circuits must expose identical input and output
/// name sets (InterfaceMismatch otherwise); outputs are matched by name.
EquivalenceReport check_equivalence(const Circuit& a, const Circuit& b,
                                    std::size_t max_exhaustive_inputs = 16,
                                    std::size_t vectors = 10000,
                                    std::uint64_t seed = 0);

} // namespace eqsat
