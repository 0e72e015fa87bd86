#pragma once

#include <optional>
#include <string>

#include "eqsat/circuit.hpp"
#include "eqsat/cost_model.hpp"
#include "eqsat/extract.hpp"
#include "eqsat/rewrite.hpp"
#include "eqsat/verify.hpp"

namespace eqsat {

/// Everything one optimize run needs; mirrors the CLI flags and config file.
struct RunConfig {
  std::string input_path;
  std::string output_path;
  std::string report_path;

  RunnerConfig runner; ///< rules filled with default_rules() when empty
  SAConfig sa;
  CostFunction cost = CostFunction::sum();
  std::string evaluator = "size"; ///< registry name, or "cmd:<template>"
  std::optional<ExternalEvaluatorSpec> external; ///< overrides `evaluator`

  bool verify = true;
  std::size_t verify_max_exhaustive = 16;
  std::size_t verify_vectors = 10000;
};

struct PhaseTimes {
  double parse = 0, convert = 0, rewrite = 0, extract = 0, emit = 0, verify = 0;
  double total = 0;
};

struct RunOutcome {
  CircuitStats stats_before, stats_after;
  RunReport rewrite_report;
  PhaseTimes times;
  std::vector<double> ranked_costs;
  std::vector<std::vector<AnnealStep>> worker_traces; ///< ranked order
  std::vector<std::pair<std::size_t, std::string>> worker_failures;
  std::optional<EquivalenceReport> equivalence;
  std::string output_eqn;

  bool ok() const {
    return !equivalence || equivalence->verdict != Verdict::Inequivalent;
  }
};

/// The full pipeline over in-memory text: parse, convert, saturate, extract
/// (parallel best-of-k), emit, verify. Stage errors are rethrown with a
/// "stage: " prefix.
RunOutcome optimize_text(const std::string& eqn_text, const RunConfig& cfg,
                         const ModelRegistry& registry);

/// File-based wrapper: reads cfg.input_path, writes cfg.output_path and, when
/// set, a JSON report to cfg.report_path.
RunOutcome run_optimize(const RunConfig& cfg, const ModelRegistry& registry);

/// Resolve cfg.evaluator / cfg.external against a registry ("cmd:..." makes
/// an ExternalCostModel on the fly).
std::shared_ptr<CostModel> resolve_evaluator(const RunConfig& cfg,
                                             const ModelRegistry& registry);

std::string report_to_json(const RunOutcome& outcome);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

} // namespace eqsat
