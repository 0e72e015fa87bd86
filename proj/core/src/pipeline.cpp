#include "eqsat/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "eqsat/convert.hpp"

namespace eqsat {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", name, e.what()));
  }
}

} // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot write '" + path + "'");
  out << contents;
}

std::shared_ptr<CostModel> resolve_evaluator(const RunConfig& cfg,
                                             const ModelRegistry& registry) {
  if (cfg.external) {
    ExternalEvaluatorSpec spec = *cfg.external;
    if (spec.max_concurrent == 0)
      spec.max_concurrent = cfg.sa.workers;
    return std::make_shared<ExternalCostModel>(spec);
  }
  if (cfg.evaluator.starts_with("cmd:")) {
    ExternalEvaluatorSpec spec;
    spec.command = cfg.evaluator.substr(4);
    spec.max_concurrent = cfg.sa.workers;
    return std::make_shared<ExternalCostModel>(spec, cfg.evaluator);
  }
  return registry.resolve(cfg.evaluator);
}

RunOutcome optimize_text(const std::string& eqn_text, const RunConfig& cfg,
                         const ModelRegistry& registry) {
  RunOutcome outcome;
  const auto run_start = Clock::now();

  auto t = Clock::now();
  Circuit original = stage("parse", [&] { return parse_equation(eqn_text); });
  outcome.stats_before = stats(original);
  outcome.times.parse = seconds_since(t);

  t = Clock::now();
  auto [graph, roots] =
      stage("convert", [&] { return circuit_to_egraph(original); });
  outcome.times.convert = seconds_since(t);

  t = Clock::now();
  RunnerConfig runner = cfg.runner;
  if (runner.rules.empty())
    runner.rules = default_rules();
  outcome.rewrite_report =
      stage("rewrite", [&] { return run_saturation(graph, runner); });
  graph.freeze();
  outcome.times.rewrite = seconds_since(t);

  t = Clock::now();
  std::shared_ptr<CostModel> evaluator = resolve_evaluator(cfg, registry);
  ParallelExtractResult extracted = stage("extract", [&] {
    return parallel_extract(graph, graph.roots(), cfg.cost, *evaluator, cfg.sa);
  });
  for (const WorkerResult& w : extracted.ranked) {
    outcome.ranked_costs.push_back(w.cost);
    outcome.worker_traces.push_back(w.trace);
  }
  outcome.worker_failures = extracted.failures;
  outcome.times.extract = seconds_since(t);

  t = Clock::now();
  std::vector<std::string> output_names;
  output_names.reserve(original.outputs().size());
  for (const auto& [name, r] : original.outputs())
    output_names.push_back(name);
  std::vector<std::string> input_names(original.inputs().begin(),
                                       original.inputs().end());
  Circuit optimized = stage("emit", [&] {
    return selection_to_circuit(graph, extracted.best().selection, graph.roots(),
                                output_names, input_names);
  });
  outcome.stats_after = stats(optimized);
  outcome.output_eqn = emit_equation(optimized);
  outcome.times.emit = seconds_since(t);

  if (cfg.verify) {
    t = Clock::now();
    outcome.equivalence = stage("verify", [&] {
      return check_equivalence(original, optimized, cfg.verify_max_exhaustive,
                               cfg.verify_vectors, cfg.sa.seed);
    });
    outcome.times.verify = seconds_since(t);
  }

  outcome.times.total = seconds_since(run_start);
  return outcome;
}

RunOutcome run_optimize(const RunConfig& cfg, const ModelRegistry& registry) {
  std::string text = read_file(cfg.input_path);
  RunOutcome outcome = optimize_text(text, cfg, registry);
  if (!cfg.output_path.empty())
    write_file(cfg.output_path, outcome.output_eqn);
  if (!cfg.report_path.empty())
    write_file(cfg.report_path, report_to_json(outcome));
  return outcome;
}

std::string report_to_json(const RunOutcome& o) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["stats_before"] = {{"node_count", o.stats_before.node_count},
                         {"depth", o.stats_before.depth},
                         {"inputs", o.stats_before.input_count},
                         {"outputs", o.stats_before.output_count}};
  doc["stats_after"] = {{"node_count", o.stats_after.node_count},
                        {"depth", o.stats_after.depth},
                        {"inputs", o.stats_after.input_count},
                        {"outputs", o.stats_after.output_count}};
  doc["egraph"] = {{"nodes_before", o.rewrite_report.nodes_before},
                   {"nodes_after", o.rewrite_report.nodes_after},
                   {"classes_before", o.rewrite_report.classes_before},
                   {"classes_after", o.rewrite_report.classes_after},
                   {"iterations", o.rewrite_report.iterations_run},
                   {"stop_reason", stop_reason_name(o.rewrite_report.stop_reason)},
                   {"matches_per_iteration", o.rewrite_report.matches_per_iteration},
                   {"match_seconds", o.rewrite_report.match_seconds},
                   {"apply_seconds", o.rewrite_report.apply_seconds},
                   {"rebuild_seconds", o.rewrite_report.rebuild_seconds}};
  doc["phase_seconds"] = {{"parse", o.times.parse},     {"convert", o.times.convert},
                          {"rewrite", o.times.rewrite}, {"extract", o.times.extract},
                          {"emit", o.times.emit},       {"verify", o.times.verify},
                          {"total", o.times.total}};
  doc["extraction"]["ranked_costs"] = o.ranked_costs;
  auto& traces = doc["extraction"]["traces"] = nlohmann::ordered_json::array();
  for (const auto& trace : o.worker_traces) {
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (const AnnealStep& s : trace)
      steps.push_back({{"iteration", s.iteration},
                       {"temperature", s.temperature},
                       {"candidate_cost", s.candidate_cost},
                       {"current_cost", s.current_cost},
                       {"best_cost", s.best_cost},
                       {"accepted", s.accepted}});
    traces.push_back(std::move(steps));
  }
  if (!o.worker_failures.empty()) {
    auto& failures = doc["extraction"]["failures"] = nlohmann::ordered_json::array();
    for (const auto& [worker, message] : o.worker_failures)
      failures.push_back({{"worker", worker}, {"error", message}});
  }
  if (o.equivalence) {
    doc["verification"] = {
        {"verdict", verdict_name(o.equivalence->verdict)},
        {"method",
         o.equivalence->method == VerifyMethod::Exhaustive ? "exhaustive" : "random-vectors"},
        {"vectors_tested", o.equivalence->vectors_tested}};
    if (!o.equivalence->counterexample.empty()) {
      auto& cex = doc["verification"]["counterexample"];
      for (const auto& [name, bit] : o.equivalence->counterexample)
        cex[name] = bit;
    }
  }
  return doc.dump(2) + "\n";
}

} // namespace eqsat
