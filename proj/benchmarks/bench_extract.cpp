#include <benchmark/benchmark.h>

#include "eqsat/convert.hpp"
#include "eqsat/extract.hpp"
#include "eqsat/generator.hpp"
#include "eqsat/rewrite.hpp"

using namespace eqsat;

namespace {

struct Fixture {
  EGraph graph;
  Fixture(std::size_t gates) {
    GeneratorConfig gen;
    gen.gate_count = gates;
    gen.input_count = 32;
    gen.seed = 11;
    Circuit c = random_circuit(gen);
    auto [g, roots] = circuit_to_egraph(c);
    RunnerConfig cfg;
    cfg.rules = default_rules();
    cfg.max_iterations = 2;
    cfg.max_nodes = 400'000;
    run_saturation(g, cfg);
    g.freeze();
    graph = std::move(g);
  }
};

void BM_greedy_extract(benchmark::State& state) {
  Fixture fx(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    ExtractResult r = greedy_extract(fx.graph, fx.graph.roots(), CostFunction::sum());
    benchmark::DoNotOptimize(r.total);
  }
}

void BM_generate_neighbor(benchmark::State& state) {
  Fixture fx(static_cast<std::size_t>(state.range(0)));
  ExtractResult greedy =
      greedy_extract(fx.graph, fx.graph.roots(), CostFunction::sum());
  std::mt19937_64 rng(5);
  for (auto _ : state) {
    Selection next = generate_neighbor(fx.graph, greedy.selection,
                                       CostFunction::sum(), 0.1, rng);
    benchmark::DoNotOptimize(next.size());
  }
}

void BM_parallel_extract(benchmark::State& state) {
  Fixture fx(static_cast<std::size_t>(state.range(0)));
  SizeCostModel size;
  SAConfig cfg;
  cfg.workers = 4;
  cfg.seed = 9;
  for (auto _ : state) {
    ParallelExtractResult r = parallel_extract(fx.graph, fx.graph.roots(),
                                               CostFunction::sum(), size, cfg);
    benchmark::DoNotOptimize(r.best().cost);
  }
}

} // namespace

BENCHMARK(BM_greedy_extract)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_generate_neighbor)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel_extract)->Arg(1000)->Unit(benchmark::kMillisecond);
