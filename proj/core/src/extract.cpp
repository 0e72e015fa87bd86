#include "eqsat/extract.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <thread>
#include <unordered_set>

#include <fmt/format.h>

#include "eqsat/convert.hpp"

namespace eqsat {

void CostFunction::validate() const {
  if (and_cost < 0 || or_cost < 0 || not_cost < 0 || var_cost < 0 || const_cost < 0)
    throw SemanticError("per-op costs must be nonnegative");
}

void SAConfig::validate() const {
  if (iterations < 1)
    throw SemanticError("sa iterations must be >= 1");
  if (workers < 1)
    throw SemanticError("workers must be >= 1");
  if (p_random < 0 || p_random > 1)
    throw SemanticError("p_random must be within [0, 1]");
  if (initial_temperature <= 0)
    throw SemanticError("initial temperature must be positive");
  if (geometric_alpha <= 0 || geometric_alpha >= 1)
    throw SemanticError("geometric alpha must be within (0, 1)");
}

namespace {

constexpr double kInf = CostsMap::kInfinity;

/// Uniform double in [0, 1) from the top 53 bits; avoids the
/// implementation-defined std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng) {
  return std::ldexp(static_cast<double>(rng() >> 11), -53);
}

/// The shared bottom-up pass. With p_random = 0 this is the greedy DP; with
/// randomness it perturbs `out` away from improving choices. The traversal
/// queue is seeded with leaf e-nodes, a popped e-node is skipped unless all
/// children are costed, and parents are re-enqueued only when their child's
/// class cost was set, which is what prunes the redundant members.
void bottom_up_pass(const EGraph& g, Selection& out, const CostFunction& cost,
                    double p_random, std::mt19937_64* rng, CostsMap& costs) {
  std::deque<std::pair<ENode, EClassId>> queue;
  for (EClassId cls : g.class_ids())
    for (const ENode& n : g.class_nodes(cls))
      if (n.arity() == 0)
        queue.emplace_back(n, cls);

  while (!queue.empty()) {
    auto [node, cls] = queue.front();
    queue.pop_front();
    cls = g.find(cls);

    double prev = costs.get(cls);
    double new_cost = cost.op_cost(node.op());
    bool ready = true;
    for (EClassId child : node.children()) {
      double child_cost = costs.get(g.find(child));
      if (child_cost == kInf) {
        ready = false;
        break;
      }
      if (cost.kind == CostKind::Sum)
        new_cost += child_cost;
      else
        new_cost = std::max(new_cost, cost.op_cost(node.op()) + child_cost);
    }
    if (!ready)
      continue; // re-enqueued when the missing child's class gets costed
    if (new_cost > prev)
      continue; // pruned: cannot beat the class minimum

    bool update;
    if (prev == kInf) {
      update = true;
    } else if (new_cost < prev) {
      update = rng == nullptr || uniform01(*rng) >= p_random;
    } else {
      update = false;
    }
    if (!update)
      continue;

    out.choose(cls, node);
    costs.set(cls, new_cost);
    for (const auto& [pnode, pcls] : g.parents(cls))
      queue.emplace_back(pnode, pcls);
  }
}

struct Reachability {
  std::vector<EClassId> classes; // reachable through the selection, roots first
};

Reachability reachable_through(const EGraph& g, const Selection& sel,
                               std::span<const EClassId> roots) {
  Reachability r;
  std::unordered_set<std::uint32_t> seen;
  std::vector<EClassId> stack;
  for (EClassId root : roots)
    stack.push_back(g.find(root));
  while (!stack.empty()) {
    EClassId cls = stack.back();
    stack.pop_back();
    if (!seen.insert(cls.value).second)
      continue;
    r.classes.push_back(cls);
    const ENode* n = sel.chosen(cls);
    if (!n)
      throw IncompleteSelection(
          fmt::format("selection has no choice for reachable class {}", cls.value));
    for (EClassId child : n->children())
      stack.push_back(g.find(child));
  }
  return r;
}

} // namespace

double selection_cost(const EGraph& g, const Selection& sel,
                      std::span<const EClassId> roots, const CostFunction& cost) {
  // Iterative DFS over the induced graph with cycle detection. Sum counts
  // each reachable class once; Depth memoizes the longest chosen path.
  enum class State : std::uint8_t { Visiting, Done };
  std::unordered_map<std::uint32_t, State> state;
  std::unordered_map<std::uint32_t, double> depth;
  double sum_total = 0;
  double depth_total = 0;

  struct Frame {
    EClassId cls;
    bool expanded;
  };
  for (EClassId root : roots) {
    std::vector<Frame> stack{{g.find(root), false}};
    while (!stack.empty()) {
      auto [cls, expanded] = stack.back();
      stack.pop_back();
      auto it = state.find(cls.value);
      if (!expanded && it != state.end() && it->second == State::Done)
        continue;
      const ENode* n = sel.chosen(cls);
      if (!n)
        throw IncompleteSelection(
            fmt::format("selection has no choice for reachable class {}", cls.value));
      if (!expanded) {
        if (it != state.end() && it->second == State::Visiting)
          throw CyclicSelection(
              fmt::format("selection induces a cycle through class {}", cls.value));
        if (it != state.end())
          continue;
        state.emplace(cls.value, State::Visiting);
        stack.push_back({cls, true});
        for (EClassId child : n->children())
          stack.push_back({g.find(child), false});
        continue;
      }
      double d = 0;
      for (EClassId child : n->children())
        d = std::max(d, depth.at(g.find(child).value));
      d += cost.op_cost(n->op());
      depth.emplace(cls.value, d);
      sum_total += cost.op_cost(n->op());
      state[cls.value] = State::Done;
    }
    depth_total = std::max(depth_total, depth.at(g.find(root).value));
  }
  return cost.kind == CostKind::Sum ? sum_total : depth_total;
}

namespace {

/// Top-down commit pass: pick per class the member whose not-yet-committed
/// children carry the least DP mass, so shared subgraphs are reused instead
/// of being re-derived. A missing choice (all members ungrounded) bails out.
Selection derive_sharing_aware(const EGraph& g, std::span<const EClassId> roots,
                               const CostFunction& cost, const CostsMap& dp) {
  Selection sel;
  std::deque<EClassId> queue;
  for (EClassId r : roots)
    queue.push_back(g.find(r));
  while (!queue.empty()) {
    EClassId cls = queue.front();
    queue.pop_front();
    if (sel.contains(cls))
      continue;
    const ENode* best = nullptr;
    double best_score = 0;
    int best_new_children = 0;
    for (const ENode& n : g.class_nodes(cls)) {
      double score = cost.op_cost(n.op());
      int new_children = 0;
      bool grounded = true;
      for (EClassId ch : n.children()) {
        EClassId c = g.find(ch);
        double d = dp.get(c);
        if (d == kInf) {
          grounded = false;
          break;
        }
        if (!sel.contains(c)) {
          score += d;
          ++new_children;
        }
      }
      if (!grounded)
        continue;
      if (!best || score < best_score ||
          (score == best_score && new_children < best_new_children)) {
        best = &n;
        best_score = score;
        best_new_children = new_children;
      }
    }
    if (!best)
      return {};
    sel.choose(cls, *best);
    for (EClassId ch : best->children())
      queue.push_back(g.find(ch));
  }
  return sel;
}

/// First-improvement sweeps over single-class alternatives, bounded by a
/// work budget since every probe re-evaluates the DAG cost.
double refine_selection(const EGraph& g, Selection& sel,
                        std::span<const EClassId> roots, const CostFunction& cost,
                        double current_total) {
  const std::size_t nodes = std::max<std::size_t>(g.num_nodes(), 1);
  std::size_t probes_left = 20'000'000 / nodes;
  double best = current_total;
  for (int sweep = 0; sweep < 40 && probes_left > 0; ++sweep) {
    bool improved = false;
    std::vector<EClassId> reach = reachable_through(g, sel, roots).classes;
    for (EClassId cls : reach) {
      ENode current = *sel.chosen(cls);
      for (const ENode& n : g.class_nodes(cls)) {
        if (n == current || probes_left == 0)
          continue;
        --probes_left;
        sel.choose(cls, n);
        double trial;
        try {
          trial = selection_cost(g, sel, roots, cost);
        } catch (const Error&) {
          sel.choose(cls, current);
          continue;
        }
        if (trial < best) {
          best = trial;
          current = n;
          improved = true;
          break;
        }
        sel.choose(cls, current);
      }
    }
    if (!improved)
      break;
  }
  return best;
}

} // namespace

ExtractResult greedy_extract(const EGraph& g, std::span<const EClassId> roots,
                             const CostFunction& cost) {
  cost.validate();
  ExtractResult result;
  bottom_up_pass(g, result.selection, cost, 0.0, nullptr, result.costs);
  for (EClassId root : roots)
    if (result.costs.get(g.find(root)) == kInf)
      throw Unextractable(fmt::format(
          "root class {} has no leaf-grounded member", g.find(root).value));
  result.total = selection_cost(g, result.selection, roots, cost);

  // The DP minimizes tree cost per class; for sum cost the reported total is
  // the DAG cost, so re-derive the selection with sharing in mind and keep
  // whichever is cheaper. Depth needs none of this: the DP total is exact.
  if (cost.kind == CostKind::Sum) {
    Selection shared = derive_sharing_aware(g, roots, cost, result.costs);
    if (!shared.empty()) {
      try {
        double total = selection_cost(g, shared, roots, cost);
        if (total < result.total) {
          result.total = total;
          result.selection = std::move(shared);
        }
      } catch (const Error&) {
      }
    }
    result.total = refine_selection(g, result.selection, roots, cost, result.total);
  }
  return result;
}

Selection generate_neighbor(const EGraph& g, const Selection& current,
                            const CostFunction& cost, double p_random,
                            std::mt19937_64& rng, CostsMap* out_costs) {
  cost.validate();
  Selection next = current;
  CostsMap costs;
  bottom_up_pass(g, next, cost, p_random, &rng, costs);
  if (out_costs)
    *out_costs = std::move(costs);
  return next;
}

double adaptive_temperature(double t_prev, std::size_t n, double delta_abs) {
  double t = n <= 3 ? t_prev * delta_abs / (static_cast<double>(n) * 10000.0)
                    : t_prev * delta_abs / static_cast<double>(n);
  return std::max(t, 1e-9);
}

AnnealResult anneal(const EGraph& g, std::span<const EClassId> roots,
                    const CostFunction& cost, const CostModel& evaluator,
                    const SAConfig& cfg) {
  cfg.validate();

  auto evaluate = [&](const Selection& sel) {
    Circuit candidate = selection_to_circuit(g, sel, roots);
    try {
      return evaluator.evaluate(candidate);
    } catch (EvaluatorFailure& e) {
      if (e.candidate().empty())
        e.set_candidate(emit_equation(candidate));
      throw;
    }
  };

  ExtractResult initial = greedy_extract(g, roots, cost);
  AnnealResult result;
  Selection current = initial.selection;
  double current_cost = evaluate(current);
  result.initial_cost = current_cost;
  result.best = current;
  result.best_cost = current_cost;

  double temperature = cfg.initial_temperature;
  result.trace.push_back(
      {0, temperature, current_cost, current_cost, current_cost, true});

  std::mt19937_64 rng(cfg.seed);
  for (std::size_t n = 1; n <= cfg.iterations; ++n) {
    Selection neighbor = generate_neighbor(g, current, cost, cfg.p_random, rng);
    double candidate_cost = evaluate(neighbor);
    double delta = candidate_cost - current_cost;

    if (n >= 2) {
      temperature = cfg.cooling == CoolingKind::PaperAdaptive
                        ? adaptive_temperature(temperature, n, std::abs(delta))
                        : std::max(temperature * cfg.geometric_alpha, 1e-9);
    }

    bool accepted = delta <= 0 || uniform01(rng) < std::exp(-delta / temperature);
    if (accepted) {
      current = std::move(neighbor);
      current_cost = candidate_cost;
    }
    if (candidate_cost < result.best_cost) {
      result.best = current; // only reachable when accepted is true (delta < 0)
      result.best_cost = candidate_cost;
    }
    result.trace.push_back(
        {n, temperature, candidate_cost, current_cost, result.best_cost, accepted});
  }
  return result;
}

ParallelExtractResult parallel_extract(const EGraph& g, std::span<const EClassId> roots,
                                       const CostFunction& cost,
                                       const CostModel& evaluator, const SAConfig& cfg) {
  cfg.validate();

  std::vector<std::optional<AnnealResult>> results(cfg.workers);
  std::vector<std::string> errors(cfg.workers);
  {
    std::vector<std::thread> pool;
    pool.reserve(cfg.workers);
    for (std::size_t w = 0; w < cfg.workers; ++w) {
      pool.emplace_back([&, w] {
        SAConfig local = cfg;
        local.seed = cfg.seed + w;
        try {
          results[w] = anneal(g, roots, cost, evaluator, local);
        } catch (const std::exception& e) {
          errors[w] = e.what();
        }
      });
    }
    for (auto& t : pool)
      t.join();
  }

  ParallelExtractResult out;
  for (std::size_t w = 0; w < cfg.workers; ++w) {
    if (results[w]) {
      out.ranked.push_back({w, results[w]->best_cost, std::move(results[w]->best),
                            std::move(results[w]->trace)});
    } else {
      out.failures.emplace_back(w, errors[w]);
    }
  }
  if (out.ranked.empty())
    throw Error("all extraction workers failed; first error: " +
                (errors.empty() ? std::string("?") : errors[0]));
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const WorkerResult& a, const WorkerResult& b) {
                     if (a.cost != b.cost)
                       return a.cost < b.cost;
                     return a.worker < b.worker;
                   });
  return out;
}

ExtractResult brute_force_extract(const EGraph& g, std::span<const EClassId> roots,
                                  const CostFunction& cost) {
  cost.validate();

  // Reachable superset: classes reachable from the roots through any member.
  std::vector<EClassId> classes;
  {
    std::unordered_set<std::uint32_t> seen;
    std::vector<EClassId> stack;
    for (EClassId r : roots)
      stack.push_back(g.find(r));
    while (!stack.empty()) {
      EClassId cls = stack.back();
      stack.pop_back();
      if (!seen.insert(cls.value).second)
        continue;
      classes.push_back(cls);
      for (const ENode& n : g.class_nodes(cls))
        for (EClassId child : n.children())
          stack.push_back(g.find(child));
    }
    std::sort(classes.begin(), classes.end());
  }

  double space = 1;
  for (EClassId cls : classes) {
    space *= static_cast<double>(g.class_nodes(cls).size());
    if (space > 1e6)
      throw TooLarge(fmt::format("selection space exceeds 10^6 ({} classes)",
                                 classes.size()));
  }

  std::vector<std::size_t> choice(classes.size(), 0);
  bool found = false;
  ExtractResult best;

  auto try_current = [&] {
    Selection sel;
    for (std::size_t i = 0; i < classes.size(); ++i)
      sel.choose(classes[i], g.class_nodes(classes[i])[choice[i]]);
    double total;
    try {
      total = selection_cost(g, sel, roots, cost);
    } catch (const CyclicSelection&) {
      return;
    }
    if (!found || total < best.total) {
      found = true;
      best.selection = std::move(sel);
      best.total = total;
    }
  };

  // Odometer over per-class choices.
  while (true) {
    try_current();
    std::size_t i = 0;
    for (; i < classes.size(); ++i) {
      if (++choice[i] < g.class_nodes(classes[i]).size())
        break;
      choice[i] = 0;
    }
    if (i == classes.size())
      break;
  }

  if (!found)
    throw Unextractable("no acyclic selection exists for the given roots");
  return best; // costs left empty: no DP pass produced this selection
}

} // namespace eqsat
