#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "eqsat/cost_model.hpp"
#include "eqsat/egraph.hpp"
#include "eqsat/selection.hpp"

namespace eqsat {

enum class CostKind { Sum, Depth };

/// Per-op costs feeding the bottom-up DP. Sum adds children, Depth takes the
/// max. All costs must be nonnegative.
struct CostFunction {
  CostKind kind = CostKind::Sum;
  double and_cost = 1, or_cost = 1, not_cost = 1, var_cost = 0, const_cost = 0;

  double op_cost(Op op) const {
    switch (op) {
    case Op::And: return and_cost;
    case Op::Or: return or_cost;
    case Op::Not: return not_cost;
    case Op::Var: return var_cost;
    case Op::Const: return const_cost;
    }
    return 0;
  }
  void validate() const;

  static CostFunction sum() { return {}; }
  static CostFunction depth() { return {CostKind::Depth, 1, 1, 1, 0, 0}; }
};

/// Best-known DP cost per e-class; infinity until first visited. Entries only
/// decrease during one bottom-up pass.
class CostsMap {
public:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  double get(EClassId cls) const {
    auto it = map_.find(cls);
    return it == map_.end() ? kInfinity : it->second;
  }
  void set(EClassId cls, double cost) { map_[cls] = cost; }
  std::size_t size() const { return map_.size(); }
  const std::unordered_map<EClassId, double, EClassIdHash>& entries() const {
    return map_;
  }

private:
  std::unordered_map<EClassId, double, EClassIdHash> map_;
};

struct ExtractResult {
  Selection selection;
  double total = 0; ///< DAG cost over the roots' reachable set
  CostsMap costs;   ///< per-class DP costs of the pass that produced this
};

/// Total cost of a selection: Sum counts each reachable class once (DAG cost,
/// not tree cost); Depth is the longest chosen path. Throws
/// IncompleteSelection / CyclicSelection on invalid selections.
double selection_cost(const EGraph& g, const Selection& sel,
                      std::span<const EClassId> roots, const CostFunction& cost);

/// Deterministic bottom-up DP over the frozen graph: queue seeded with leaf
/// e-nodes, classes re-relaxed as children improve. For sum cost the returned
/// selection is additionally rederived with sharing in mind (the DP minimizes
/// tree cost, the total is DAG cost) and polished by bounded local descent;
/// `costs` always holds the plain DP values. Throws Unextractable when a root
/// has no leaf-grounded member.
ExtractResult greedy_extract(const EGraph& g, std::span<const EClassId> roots,
                             const CostFunction& cost);

/// One SA neighbor: the same pruned bottom-up traversal, except that a
/// strictly improving update is skipped with probability p_random. Choices
/// are finalized only over already-costed children, so the result is always
/// complete and acyclic. `out_costs`, when given, receives the per-class DP
/// costs of the pass.
Selection generate_neighbor(const EGraph& g, const Selection& current,
                            const CostFunction& cost, double p_random,
                            std::mt19937_64& rng, CostsMap* out_costs = nullptr);

enum class CoolingKind { PaperAdaptive, Geometric };

struct SAConfig {
  std::size_t iterations = 4;
  double initial_temperature = 2000.0;
  double p_random = 0.1;
  std::size_t workers = 4;
  std::uint64_t seed = 0;
  CoolingKind cooling = CoolingKind::PaperAdaptive;
  double geometric_alpha = 0.5;

  void validate() const;
};

/// Adaptive schedule: T1 = initial; for n in {2,3}
/// Tn = Tn-1 * |delta| / (n * 10000); from n = 4 on, Tn = Tn-1 * |delta| / n.
/// Clamped to 1e-9 so exp(-delta/T) stays well-defined when |delta| = 0.
double adaptive_temperature(double t_prev, std::size_t n, double delta_abs);

struct AnnealStep {
  std::size_t iteration = 0; ///< 0 is the greedy initial solution
  double temperature = 0;
  double candidate_cost = 0;
  double current_cost = 0;
  double best_cost = 0;
  bool accepted = false;
};

struct AnnealResult {
  Selection best;
  double best_cost = 0;
  double initial_cost = 0;
  std::vector<AnnealStep> trace;
};

/// Simulated-annealing extraction: greedy initial solution, then per
/// iteration generate a neighbor, evaluate it, and accept when delta <= 0 or
/// with probability exp(-delta/T). Returns the best-so-far, never worse than
/// the evaluated initial solution. EvaluatorFailure carries the candidate.
AnnealResult anneal(const EGraph& g, std::span<const EClassId> roots,
                    const CostFunction& cost, const CostModel& evaluator,
                    const SAConfig& cfg);

struct WorkerResult {
  std::size_t worker = 0;
  double cost = 0;
  Selection selection;
  std::vector<AnnealStep> trace;
};

struct ParallelExtractResult {
  std::vector<WorkerResult> ranked; ///< ascending evaluated cost
  std::vector<std::pair<std::size_t, std::string>> failures;
  const WorkerResult& best() const { return ranked.front(); }
};

/// cfg.workers independent annealers over the shared frozen graph, worker i
/// seeded with cfg.seed + i; results ranked by cost (worker index breaks
/// ties). Succeeds if at least one worker succeeds.
ParallelExtractResult parallel_extract(const EGraph& g, std::span<const EClassId> roots,
                                       const CostFunction& cost,
                                       const CostModel& evaluator, const SAConfig& cfg);

/// Exhaustive oracle: enumerates every acyclic selection. Guarded by the
/// product of reachable class sizes (<= 10^6, throws TooLarge beyond).
ExtractResult brute_force_extract(const EGraph& g, std::span<const EClassId> roots,
                                  const CostFunction& cost);

} // namespace eqsat
