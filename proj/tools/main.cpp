#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "eqsat/convert.hpp"
#include "eqsat/generator.hpp"
#include "eqsat/pipeline.hpp"
#include "eqsat/verify.hpp"

#include "config_file.hpp"

namespace {

using namespace eqsat;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Shared optimization/extraction knobs; merged from config file then flags.
struct CommonArgs {
  std::string config_path;
  std::string rules_path;
  std::size_t iterations = 5;
  std::size_t max_nodes = 1'000'000;
  double time_limit_secs = 60;
  std::string cost = "size";
  std::string evaluator = "size";
  std::string eval_command, eval_regex;
  double eval_timeout_secs = 30;
  std::size_t eval_max_concurrent = 0;
  std::size_t workers = 4;
  std::size_t sa_iterations = 4;
  double p_random = 0.1;
  double t0 = 2000;
  std::string cooling = "paper";
  std::uint64_t seed = 0;
  std::string report_path;
  std::string trace_path;
  bool no_verify = false;
};

void add_common_flags(CLI::App* cmd, CommonArgs& a, bool with_rewrite,
                      bool with_verify) {
  cmd->add_option("--config", a.config_path,
                  "Config file (TOML subset or .json); flags override it");
  if (with_rewrite) {
    cmd->add_option("--rules", a.rules_path, "Extra rewrite rules (JSON file)");
    cmd->add_option("--iterations", a.iterations, "Rewrite iteration budget");
    cmd->add_option("--max-nodes", a.max_nodes, "Rewrite e-node budget");
    cmd->add_option("--time-limit", a.time_limit_secs, "Rewrite time budget (s)");
  }
  cmd->add_option("--cost", a.cost, "Extraction cost function: size | depth")
      ->check(CLI::IsMember({"size", "depth"}));
  cmd->add_option("--evaluator", a.evaluator,
                  "Cost model: registry name or cmd:<template with {}>");
  cmd->add_option("--workers", a.workers, "Parallel annealing workers");
  cmd->add_option("--sa-iterations", a.sa_iterations, "Annealing iterations");
  cmd->add_option("--p-random", a.p_random,
                  "Probability of skipping an improving choice, in [0,1]");
  cmd->add_option("--t0", a.t0, "Initial annealing temperature");
  cmd->add_option("--cooling", a.cooling, "paper | geometric:<alpha>");
  cmd->add_option("--seed", a.seed, "Random seed");
  cmd->add_option("--report", a.report_path, "Write a JSON run report");
  cmd->add_option("--trace", a.trace_path, "Write SA traces as JSON lines");
  if (with_verify)
    cmd->add_flag("--no-verify", a.no_verify, "Skip equivalence checking");
}

/// Config-file values fill in every option the command line left untouched.
void merge_config(const CLI::App* cmd, CommonArgs& a) {
  if (a.config_path.empty())
    return;
  cli::ConfigValues values = cli::load_config_file(a.config_path);
  auto absent = [&](const char* flag) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    return opt != nullptr && opt->count() == 0;
  };
  auto pick = [&](const char* key, const char* flag, auto& into) {
    auto it = values.find(key);
    if (it == values.end() || !absent(flag))
      return;
    using T = std::decay_t<decltype(into)>;
    if constexpr (std::is_same_v<T, std::string>)
      into = it->second;
    else if constexpr (std::is_same_v<T, bool>)
      into = it->second == "true" || it->second == "1";
    else if constexpr (std::is_floating_point_v<T>)
      into = std::stod(it->second);
    else
      into = static_cast<T>(std::stoull(it->second));
  };
  pick("rules", "--rules", a.rules_path);
  pick("iterations", "--iterations", a.iterations);
  pick("max_nodes", "--max-nodes", a.max_nodes);
  pick("time_limit_secs", "--time-limit", a.time_limit_secs);
  pick("cost", "--cost", a.cost);
  pick("evaluator", "--evaluator", a.evaluator);
  pick("workers", "--workers", a.workers);
  pick("sa_iterations", "--sa-iterations", a.sa_iterations);
  pick("p_random", "--p-random", a.p_random);
  pick("t0", "--t0", a.t0);
  pick("cooling", "--cooling", a.cooling);
  pick("seed", "--seed", a.seed);
  pick("report", "--report", a.report_path);
  pick("trace", "--trace", a.trace_path);
  pick("evaluator.command", "--evaluator", a.eval_command);
  if (auto it = values.find("evaluator.parse_regex"); it != values.end())
    a.eval_regex = it->second;
  if (auto it = values.find("evaluator.timeout_secs"); it != values.end())
    a.eval_timeout_secs = std::stod(it->second);
  if (auto it = values.find("evaluator.max_concurrent"); it != values.end())
    a.eval_max_concurrent = std::stoull(it->second);
  if (auto it = values.find("verify"); it != values.end()) {
    const CLI::Option* opt = cmd->get_option_no_throw("--no-verify");
    if (opt && opt->count() == 0)
      a.no_verify = !(it->second == "true" || it->second == "1");
  }
}

RunConfig to_run_config(const CommonArgs& a) {
  RunConfig cfg;
  cfg.runner.max_iterations = a.iterations;
  cfg.runner.max_nodes = a.max_nodes;
  cfg.runner.time_limit = std::chrono::duration<double>(a.time_limit_secs);
  if (!a.rules_path.empty()) {
    cfg.runner.rules = default_rules();
    for (Rule& r : rules_from_json(read_file(a.rules_path)))
      cfg.runner.rules.push_back(std::move(r));
  }
  cfg.cost = a.cost == "depth" ? CostFunction::depth() : CostFunction::sum();
  cfg.evaluator = a.evaluator;
  if (!a.eval_command.empty()) {
    ExternalEvaluatorSpec spec;
    spec.command = a.eval_command;
    if (!a.eval_regex.empty())
      spec.parse_regex = a.eval_regex;
    spec.timeout = std::chrono::duration<double>(a.eval_timeout_secs);
    spec.max_concurrent = a.eval_max_concurrent;
    cfg.external = spec;
  }
  cfg.sa.iterations = a.sa_iterations;
  cfg.sa.initial_temperature = a.t0;
  cfg.sa.p_random = a.p_random;
  cfg.sa.workers = a.workers;
  cfg.sa.seed = a.seed;
  if (a.cooling == "paper") {
    cfg.sa.cooling = CoolingKind::PaperAdaptive;
  } else if (a.cooling.rfind("geometric:", 0) == 0) {
    cfg.sa.cooling = CoolingKind::Geometric;
    cfg.sa.geometric_alpha = std::stod(a.cooling.substr(10));
  } else {
    throw Error("bad --cooling value '" + a.cooling + "' (paper | geometric:<alpha>)");
  }
  cfg.verify = !a.no_verify;
  cfg.report_path = a.report_path;
  return cfg;
}

void write_trace_jsonl(const std::string& path,
                       const std::vector<std::vector<AnnealStep>>& traces) {
  std::string out;
  for (std::size_t w = 0; w < traces.size(); ++w)
    for (const AnnealStep& s : traces[w]) {
      nlohmann::ordered_json line = {{"worker", w},
                                     {"iteration", s.iteration},
                                     {"temperature", s.temperature},
                                     {"candidate_cost", s.candidate_cost},
                                     {"current_cost", s.current_cost},
                                     {"best_cost", s.best_cost},
                                     {"accepted", s.accepted}};
      out += line.dump();
      out += '\n';
    }
  write_file(path, out);
}

int cmd_optimize(const CommonArgs& args, const std::string& input,
                 const std::string& output) {
  RunConfig cfg = to_run_config(args);
  cfg.input_path = input;
  cfg.output_path = output;
  ModelRegistry registry = ModelRegistry::with_builtins();
  RunOutcome out = run_optimize(cfg, registry);
  if (!args.trace_path.empty())
    write_trace_jsonl(args.trace_path, out.worker_traces);

  fmt::print("input : {} gates, depth {}\n", out.stats_before.node_count,
             out.stats_before.depth);
  fmt::print("egraph: {} -> {} nodes, {} -> {} classes ({} iterations, {})\n",
             out.rewrite_report.nodes_before, out.rewrite_report.nodes_after,
             out.rewrite_report.classes_before, out.rewrite_report.classes_after,
             out.rewrite_report.iterations_run,
             stop_reason_name(out.rewrite_report.stop_reason));
  fmt::print("output: {} gates, depth {}\n", out.stats_after.node_count,
             out.stats_after.depth);
  if (out.equivalence)
    fmt::print("verify: {} ({} vectors)\n", verdict_name(out.equivalence->verdict),
               out.equivalence->vectors_tested);
  fmt::print("time  : {:.3f}s total\n", out.times.total);
  return out.ok() ? 0 : 1;
}

int cmd_convert(const std::string& input, const std::string& output,
                std::string direction) {
  if (direction.empty()) {
    if (input.size() > 5 && input.substr(input.size() - 5) == ".json")
      direction = "to-circuit";
    else
      direction = "to-egraph";
  }
  if (direction == "to-egraph") {
    Circuit c = parse_equation(read_file(input));
    auto [g, roots] = circuit_to_egraph(c);
    SerializedEGraph s = serialize(g);
    s.meta.name = c.name();
    for (const auto& [name, r] : c.outputs())
      s.meta.outputs.push_back(name);
    s.meta.inputs.assign(c.inputs().begin(), c.inputs().end());
    write_file(output, to_json(s));
    fmt::print("serialized {} nodes in {} classes\n", s.nodes.size(), s.classes.size());
    return 0;
  }
  if (direction != "to-circuit")
    throw Error("--direction must be to-egraph or to-circuit");

  SerializedEGraph s = from_json(read_file(input));
  SerializedIdMap ids;
  EGraph g = deserialize(s, &ids);
  Selection sel;
  if (!s.selection.empty()) {
    sel = selection_from_serialized(g, s, ids);
  } else {
    bool multi = false;
    for (EClassId cls : g.class_ids())
      multi |= g.class_nodes(cls).size() > 1;
    if (multi)
      throw Error("this e-graph has classes with several members; run `eqsat "
                  "extract` first or embed a \"selection\"");
    sel = identity_selection(g);
  }
  Circuit c = selection_to_circuit(g, sel, g.roots(), s.meta.outputs, s.meta.inputs);
  write_file(output, emit_equation(c));
  fmt::print("emitted {} gates, depth {}\n", stats(c).node_count, stats(c).depth);
  return 0;
}

int cmd_extract(const CommonArgs& args, const std::string& input,
                const std::string& output, const std::string& selection_out) {
  RunConfig cfg = to_run_config(args);
  ModelRegistry registry = ModelRegistry::with_builtins();
  std::shared_ptr<CostModel> evaluator = resolve_evaluator(cfg, registry);

  SerializedEGraph s = from_json(read_file(input));
  SerializedIdMap ids;
  EGraph g = deserialize(s, &ids);
  ParallelExtractResult result =
      parallel_extract(g, g.roots(), cfg.cost, *evaluator, cfg.sa);

  Circuit c = selection_to_circuit(g, result.best().selection, g.roots(),
                                   s.meta.outputs, s.meta.inputs);
  if (!output.empty())
    write_file(output, emit_equation(c));
  if (!selection_out.empty()) {
    // embed the winning selection into a copy of the input document
    SerializedEGraph annotated = s;
    annotated.selection.clear();
    std::map<std::uint32_t, std::string> class_key;
    for (const auto& [key, cls] : ids.class_of)
      class_key.emplace(g.find(cls).value, key);
    for (const auto& [cls, node] : result.best().selection.entries()) {
      const std::string& ckey = class_key.at(g.find(cls).value);
      // find the member node id whose serialized form matches
      for (const std::string& nkey : annotated.classes.at(ckey)) {
        const SerializedEGraph::Node& sn = annotated.nodes.at(nkey);
        std::string op = std::string(op_name(node.op()));
        if (node.op() == Op::Var)
          op = "var:" + g.symbol_name(node.symbol());
        if (node.op() == Op::Const)
          op = node.const_bit() ? "const:1" : "const:0";
        if (sn.op != op || sn.children.size() != node.arity())
          continue;
        bool same = true;
        for (std::size_t i = 0; i < sn.children.size(); ++i)
          same = same && g.find(ids.class_of.at(sn.children[i])) ==
                             g.find(node.children()[i]);
        if (same) {
          annotated.selection.emplace(ckey, nkey);
          break;
        }
      }
    }
    write_file(selection_out, to_json(annotated));
  }
  if (!args.trace_path.empty()) {
    std::vector<std::vector<AnnealStep>> traces;
    for (const WorkerResult& w : result.ranked)
      traces.push_back(w.trace);
    write_trace_jsonl(args.trace_path, traces);
  }
  fmt::print("best cost {} (worker {}), {} gates, depth {}\n", result.best().cost,
             result.best().worker, stats(c).node_count, stats(c).depth);
  return 0;
}

int cmd_verify(const std::string& left, const std::string& right,
               std::size_t max_exhaustive, std::size_t vectors, std::uint64_t seed) {
  Circuit a = parse_equation(read_file(left));
  Circuit b = parse_equation(read_file(right));
  EquivalenceReport r = check_equivalence(a, b, max_exhaustive, vectors, seed);
  fmt::print("{} ({}, {} vectors)\n", verdict_name(r.verdict),
             r.method == VerifyMethod::Exhaustive ? "exhaustive" : "random-vectors",
             r.vectors_tested);
  if (r.verdict == Verdict::Inequivalent) {
    std::string cex;
    for (const auto& [name, bit] : r.counterexample)
      cex += fmt::format("{}={} ", name, bit ? 1 : 0);
    fmt::print("counterexample: {}\n", cex);
    return 1;
  }
  return 0;
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::uint64_t seed, bool json) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  if (!json)
    fmt::print("{:>9} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}\n", "gates", "parse_s",
               "forward_s", "backward_s", "rewrite_s", "extract_s", "total_s");
  for (std::size_t size : sizes) {
    GeneratorConfig gen;
    gen.gate_count = size;
    gen.input_count = 64;
    gen.seed = seed;
    Circuit c = random_circuit(gen);
    std::string eqn = emit_equation(c);

    auto total_start = Clock::now();
    auto t = Clock::now();
    Circuit parsed = parse_equation(eqn);
    double parse_s = seconds_since(t);

    t = Clock::now();
    auto [g, roots] = circuit_to_egraph(parsed);
    std::string forward_json;
    {
      SerializedEGraph s = serialize(g);
      s.meta.name = parsed.name();
      forward_json = to_json(s);
    }
    double forward_s = seconds_since(t);

    t = Clock::now();
    {
      SerializedEGraph s = from_json(forward_json);
      EGraph back = deserialize(s);
      Selection sel = identity_selection(back);
      Circuit round = selection_to_circuit(back, sel, back.roots());
      emit_equation(round);
    }
    double backward_s = seconds_since(t);

    // fixed-budget saturation + extraction on the same graph
    t = Clock::now();
    RunnerConfig rc;
    rc.rules = default_rules();
    rc.max_iterations = 1;
    rc.max_nodes = 4'000'000;
    rc.time_limit = std::chrono::duration<double>(120);
    run_saturation(g, rc);
    g.freeze();
    double rewrite_s = seconds_since(t);

    t = Clock::now();
    SizeCostModel size_model;
    SAConfig sa;
    sa.workers = 1;
    sa.iterations = 2;
    sa.seed = seed;
    parallel_extract(g, g.roots(), CostFunction::sum(), size_model, sa);
    double extract_s = seconds_since(t);
    double total_s = seconds_since(total_start);

    if (json) {
      rows.push_back({{"gates", size},
                      {"parse_s", parse_s},
                      {"forward_s", forward_s},
                      {"backward_s", backward_s},
                      {"rewrite_s", rewrite_s},
                      {"extract_s", extract_s},
                      {"total_s", total_s}});
    } else {
      fmt::print("{:>9} {:>10.4f} {:>10.4f} {:>10.4f} {:>10.4f} {:>10.4f} {:>10.4f}\n",
                 size, parse_s, forward_s, backward_s, rewrite_s, extract_s, total_s);
    }
  }
  if (json)
    fmt::print("{}\n", rows.dump(2));
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"equality-saturation optimizer for combinational logic netlists"};
  app.require_subcommand(1);

  CommonArgs opt_args, ext_args;
  std::string opt_input, opt_output;
  auto* optimize = app.add_subcommand(
      "optimize", "Rewrite, extract and verify an equation netlist");
  optimize->add_option("input", opt_input, "Input .eqn file")->required();
  optimize->add_option("-o,--output", opt_output, "Optimized .eqn file")->required();
  add_common_flags(optimize, opt_args, true, true);

  std::string conv_input, conv_output, conv_direction;
  auto* convert =
      app.add_subcommand("convert", "Convert between .eqn and e-graph JSON");
  convert->add_option("input", conv_input, "Input file")->required();
  convert->add_option("-o,--output", conv_output, "Output file")->required();
  convert->add_option("--direction", conv_direction, "to-egraph | to-circuit");

  std::string ext_input, ext_output, ext_selection;
  auto* extract = app.add_subcommand(
      "extract", "Extract the best circuit from an e-graph JSON file");
  extract->add_option("input", ext_input, "Serialized e-graph (JSON)")->required();
  extract->add_option("-o,--output", ext_output, "Extracted .eqn file");
  extract->add_option("--selection-out", ext_selection,
                      "Write the input e-graph with the winning selection embedded");
  add_common_flags(extract, ext_args, false, false);

  std::string ver_left, ver_right;
  std::size_t ver_exhaustive = 16, ver_vectors = 10000;
  std::uint64_t ver_seed = 0;
  auto* verify = app.add_subcommand("verify", "Check functional equivalence");
  verify->add_option("left", ver_left, "First .eqn file")->required();
  verify->add_option("right", ver_right, "Second .eqn file")->required();
  verify->add_option("--max-exhaustive", ver_exhaustive,
                     "Exhaustive-check input limit");
  verify->add_option("--vectors", ver_vectors, "Random vectors beyond the limit");
  verify->add_option("--seed", ver_seed, "Random-vector seed");

  std::vector<std::size_t> bench_sizes{1000, 10000, 100000};
  std::uint64_t bench_seed = 1;
  bool bench_json = false;
  auto* bench = app.add_subcommand("bench", "Time conversion and extraction");
  bench->add_option("--sizes", bench_sizes, "Gate counts to benchmark")
      ->delimiter(',');
  bench->add_option("--seed", bench_seed, "Generator seed");
  bench->add_flag("--json", bench_json, "Emit a JSON array instead of a table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed()) {
      merge_config(optimize, opt_args);
      return cmd_optimize(opt_args, opt_input, opt_output);
    }
    if (convert->parsed())
      return cmd_convert(conv_input, conv_output, conv_direction);
    if (extract->parsed()) {
      merge_config(extract, ext_args);
      return cmd_extract(ext_args, ext_input, ext_output, ext_selection);
    }
    if (verify->parsed())
      return cmd_verify(ver_left, ver_right, ver_exhaustive, ver_vectors, ver_seed);
    if (bench->parsed())
      return cmd_bench(bench_sizes, bench_seed, bench_json);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 2;
}
