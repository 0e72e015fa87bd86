#include <benchmark/benchmark.h>

#include "eqsat/convert.hpp"
#include "eqsat/generator.hpp"

using namespace eqsat;

namespace {

Circuit circuit_of(std::int64_t gates) {
  GeneratorConfig cfg;
  cfg.gate_count = static_cast<std::size_t>(gates);
  cfg.input_count = 64;
  cfg.seed = 7;
  return random_circuit(cfg);
}

void BM_circuit_to_egraph(benchmark::State& state) {
  Circuit c = circuit_of(state.range(0));
  for (auto _ : state) {
    auto [g, roots] = circuit_to_egraph(c);
    benchmark::DoNotOptimize(g.num_nodes());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_forward_serialize(benchmark::State& state) {
  Circuit c = circuit_of(state.range(0));
  for (auto _ : state) {
    auto [g, roots] = circuit_to_egraph(c);
    std::string json = to_json(serialize(g));
    benchmark::DoNotOptimize(json.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_backward_deserialize(benchmark::State& state) {
  Circuit c = circuit_of(state.range(0));
  auto [g, roots] = circuit_to_egraph(c);
  std::string json = to_json(serialize(g));
  for (auto _ : state) {
    EGraph back = deserialize(from_json(json));
    Selection sel = identity_selection(back);
    Circuit round = selection_to_circuit(back, sel, back.roots());
    benchmark::DoNotOptimize(round.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_parse_emit(benchmark::State& state) {
  std::string eqn = emit_equation(circuit_of(state.range(0)));
  for (auto _ : state) {
    Circuit c = parse_equation(eqn);
    benchmark::DoNotOptimize(emit_equation(c).size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_circuit_to_egraph)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forward_serialize)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_backward_deserialize)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parse_emit)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
