#pragma once

#include <cstdint>

#include "eqsat/circuit.hpp"

namespace eqsat {

/// Seeded random-circuit generator for benchmarks and property tests.
/// Circuits are built through the hashconsing builder, so every generated
/// gate is structurally distinct; all fanout-free gates become outputs.
struct GeneratorConfig {
  std::size_t gate_count = 100; ///< And/Or/Not nodes to create
  std::size_t input_count = 8;
  double not_fraction = 0.25; ///< remaining mass splits evenly between And/Or
  std::uint64_t seed = 1;
};

Circuit random_circuit(const GeneratorConfig& cfg);

} // namespace eqsat
