#include "eqsat/generator.hpp"

#include <random>
#include <vector>

#include <fmt/format.h>

namespace eqsat {

Circuit random_circuit(const GeneratorConfig& cfg) {
  if (cfg.input_count == 0)
    throw SemanticError("generator needs at least one input");
  std::mt19937_64 rng(cfg.seed);

  CircuitBuilder builder(fmt::format("rand_{}g_{}i_s{}", cfg.gate_count,
                                     cfg.input_count, cfg.seed));
  std::vector<NodeRef> pool;
  pool.reserve(cfg.input_count + cfg.gate_count);
  for (std::size_t i = 0; i < cfg.input_count; ++i)
    pool.push_back(builder.add_input(fmt::format("x{}", i)));

  std::vector<std::uint32_t> fanout(cfg.input_count + cfg.gate_count, 0);
  auto pick = [&] { return pool[rng() % pool.size()]; };

  std::size_t made = 0;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 100 * (cfg.gate_count + 16);
  while (made < cfg.gate_count) {
    if (++attempts > max_attempts)
      throw SemanticError("generator cannot place enough distinct gates; "
                          "raise input_count or lower gate_count");
    double p = static_cast<double>(rng() >> 11) * 0x1p-53;
    std::size_t before = builder.size();
    NodeRef a = pick();
    NodeRef b = 0;
    NodeRef r;
    if (p < cfg.not_fraction) {
      r = builder.make_not(a);
    } else {
      b = pick();
      r = p < cfg.not_fraction + (1.0 - cfg.not_fraction) / 2 ? builder.make_and(a, b)
                                                              : builder.make_or(a, b);
    }
    if (builder.size() == before)
      continue; // hashcons hit: that gate already exists
    pool.push_back(r);
    ++made;
    ++fanout[a];
    if (p >= cfg.not_fraction)
      ++fanout[b];
  }

  std::size_t out = 0;
  for (std::size_t i = cfg.input_count; i < pool.size(); ++i)
    if (fanout[pool[i]] == 0)
      builder.add_output(fmt::format("o{}", out++), pool[i]);
  return builder.build();
}

} // namespace eqsat
