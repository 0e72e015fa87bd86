#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "eqsat/circuit.hpp"

namespace eqsat {

enum class CostMode { RuntimePrioritized, QualityPrioritized };

/// Scores an extracted circuit; lower is better. Built-in models are pure and
/// concurrency-safe; external ones are opaque commands.
class CostModel {
public:
  virtual ~CostModel() = default;
  virtual double evaluate(const Circuit& c) const = 0;
  virtual std::string name() const = 0;
  virtual CostMode mode() const { return CostMode::RuntimePrioritized; }
};

double size_cost(const Circuit& c);  ///< gate count
double depth_cost(const Circuit& c); ///< logic depth

class SizeCostModel final : public CostModel {
public:
  double evaluate(const Circuit& c) const override { return size_cost(c); }
  std::string name() const override { return "size"; }
};

class DepthCostModel final : public CostModel {
public:
  double evaluate(const Circuit& c) const override { return depth_cost(c); }
  std::string name() const override { return "depth"; }
};

/// How to run an external scoring command: the template's `{}` placeholder is
/// replaced with the path of a temporary .eqn file holding the candidate, and
/// the first (only) capture group of parse_regex read from the combined
/// stdout/stderr becomes the cost.
struct ExternalEvaluatorSpec {
  std::string command;
  std::string parse_regex = R"(([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*$)";
  std::chrono::duration<double> timeout = std::chrono::seconds(30);
  /// Cap on concurrent child processes; 0 means unlimited (callers usually
  /// set this to the extraction worker count).
  std::size_t max_concurrent = 0;

  /// Throws SemanticError unless the template has exactly one `{}` and the
  /// regex exactly one capture group.
  void validate() const;
};

/// Runs spec.command on the emitted circuit. Throws EvaluatorFailure
/// (Timeout | NonzeroExit | NoMatch | NotANumber) with the captured output
/// attached. The temporary file is always removed.
double external_evaluate(const ExternalEvaluatorSpec& spec, const Circuit& c);

class ExternalCostModel final : public CostModel {
public:
  explicit ExternalCostModel(ExternalEvaluatorSpec spec, std::string name = "external");
  double evaluate(const Circuit& c) const override;
  std::string name() const override { return name_; }
  CostMode mode() const override { return CostMode::QualityPrioritized; }
  const ExternalEvaluatorSpec& spec() const { return spec_; }

private:
  ExternalEvaluatorSpec spec_;
  std::string name_;
  // throttles concurrent child processes to spec_.max_concurrent
  mutable std::mutex gate_mutex_;
  mutable std::condition_variable gate_cv_;
  mutable std::size_t in_flight_ = 0;
};

/// Cost models selectable by name from the CLI and config files.
class ModelRegistry {
public:
  /// Throws DuplicateName if a model with the same name is registered.
  void register_model(std::shared_ptr<CostModel> model);
  /// Throws UnknownModel listing the known names.
  std::shared_ptr<CostModel> resolve(const std::string& name) const;
  std::vector<std::string> names() const;

  /// "size" and "depth" preregistered.
  static ModelRegistry with_builtins();

private:
  std::vector<std::shared_ptr<CostModel>> models_;
};

} // namespace eqsat
