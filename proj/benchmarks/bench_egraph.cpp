#include <benchmark/benchmark.h>

#include "eqsat/convert.hpp"
#include "eqsat/generator.hpp"
#include "eqsat/rewrite.hpp"

using namespace eqsat;

namespace {

void BM_add_hashcons(benchmark::State& state) {
  for (auto _ : state) {
    EGraph g;
    EClassId a = g.add_var("a");
    EClassId b = g.add_var("b");
    EClassId prev = a;
    for (std::int64_t i = 0; i < state.range(0); ++i)
      prev = g.add(i % 2 ? ENode::make_and(prev, b) : ENode::make_or(prev, a));
    benchmark::DoNotOptimize(g.num_nodes());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_saturation_iteration(benchmark::State& state) {
  GeneratorConfig gen;
  gen.gate_count = static_cast<std::size_t>(state.range(0));
  gen.input_count = 32;
  gen.seed = 3;
  Circuit c = random_circuit(gen);
  for (auto _ : state) {
    auto [g, roots] = circuit_to_egraph(c);
    RunnerConfig cfg;
    cfg.rules = default_rules();
    cfg.max_iterations = 1;
    cfg.max_nodes = 10'000'000;
    RunReport report = run_saturation(g, cfg);
    benchmark::DoNotOptimize(report.nodes_after);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_add_hashcons)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_saturation_iteration)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
