#include "eqsat/cost_model.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>

#include <unistd.h>

#include <fmt/format.h>

#include "subprocess.hpp"

namespace eqsat {

double size_cost(const Circuit& c) {
  return static_cast<double>(stats(c).node_count);
}

double depth_cost(const Circuit& c) {
  return static_cast<double>(stats(c).depth);
}

void ExternalEvaluatorSpec::validate() const {
  std::size_t first = command.find("{}");
  if (first == std::string::npos || command.find("{}", first + 1) != std::string::npos)
    throw SemanticError("evaluator command needs exactly one {} path placeholder");
  std::regex re;
  try {
    re.assign(parse_regex);
  } catch (const std::regex_error& e) {
    throw SemanticError(std::string("bad evaluator parse_regex: ") + e.what());
  }
  if (re.mark_count() != 1)
    throw SemanticError("evaluator parse_regex needs exactly one capture group");
  if (timeout.count() <= 0)
    throw SemanticError("evaluator timeout must be positive");
}

namespace {

/// Temporary .eqn file removed on scope exit.
class TempEqnFile {
public:
  explicit TempEqnFile(const std::string& contents) {
    namespace fs = std::filesystem;
    std::string tmpl = (fs::temp_directory_path() / "eqsat-cand-XXXXXX.eqn").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    int fd = mkstemps(buf.data(), 4);
    if (fd < 0)
      throw Error("cannot create temporary file");
    path_.assign(buf.data());
    ssize_t off = 0;
    while (off < static_cast<ssize_t>(contents.size())) {
      ssize_t wrote = write(fd, contents.data() + off, contents.size() - off);
      if (wrote <= 0)
        break;
      off += wrote;
    }
    close(fd);
  }
  ~TempEqnFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'')
      out += "'\\''";
    else
      out += ch;
  }
  out += "'";
  return out;
}

} // namespace

double external_evaluate(const ExternalEvaluatorSpec& spec, const Circuit& c) {
  spec.validate();
  std::string eqn = emit_equation(c);
  TempEqnFile file(eqn);

  std::string cmd = spec.command;
  cmd.replace(cmd.find("{}"), 2, shell_quote(file.path()));

  detail::CommandResult run = detail::run_command(cmd, spec.timeout);
  if (run.timed_out)
    throw EvaluatorFailure(EvaluatorFailure::Reason::Timeout,
                           fmt::format("evaluator timed out after {:.1f}s", spec.timeout.count()),
                           run.output, eqn);
  if (run.exit_code != 0)
    throw EvaluatorFailure(EvaluatorFailure::Reason::NonzeroExit,
                           fmt::format("evaluator exited with status {}", run.exit_code),
                           run.output, eqn);

  std::smatch m;
  std::regex re(spec.parse_regex);
  if (!std::regex_search(run.output, m, re) || m.size() < 2)
    throw EvaluatorFailure(EvaluatorFailure::Reason::NoMatch,
                           "evaluator output did not match parse_regex", run.output, eqn);
  try {
    std::size_t consumed = 0;
    std::string text = m[1].str();
    double value = std::stod(text, &consumed);
    if (consumed != text.size())
      throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw EvaluatorFailure(EvaluatorFailure::Reason::NotANumber,
                           fmt::format("captured '{}' is not a number", m[1].str()),
                           run.output, eqn);
  }
}

ExternalCostModel::ExternalCostModel(ExternalEvaluatorSpec spec, std::string name)
    : spec_(std::move(spec)), name_(std::move(name)) {
  spec_.validate();
}

double ExternalCostModel::evaluate(const Circuit& c) const {
  if (spec_.max_concurrent == 0)
    return external_evaluate(spec_, c);
  {
    std::unique_lock lock(gate_mutex_);
    gate_cv_.wait(lock, [&] { return in_flight_ < spec_.max_concurrent; });
    ++in_flight_;
  }
  try {
    double value = external_evaluate(spec_, c);
    std::lock_guard lock(gate_mutex_);
    --in_flight_;
    gate_cv_.notify_one();
    return value;
  } catch (...) {
    std::lock_guard lock(gate_mutex_);
    --in_flight_;
    gate_cv_.notify_one();
    throw;
  }
}

void ModelRegistry::register_model(std::shared_ptr<CostModel> model) {
  for (const auto& m : models_)
    if (m->name() == model->name())
      throw DuplicateName("cost model '" + model->name() + "' is already registered");
  models_.push_back(std::move(model));
}

std::shared_ptr<CostModel> ModelRegistry::resolve(const std::string& name) const {
  for (const auto& m : models_)
    if (m->name() == name)
      return m;
  std::string known;
  for (const auto& m : models_) {
    if (!known.empty())
      known += ", ";
    known += m->name();
  }
  throw UnknownModel(fmt::format("unknown cost model '{}' (known: {})", name, known));
}

std::vector<std::string> ModelRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(models_.size());
  for (const auto& m : models_)
    out.push_back(m->name());
  return out;
}

ModelRegistry ModelRegistry::with_builtins() {
  ModelRegistry registry;
  registry.register_model(std::make_shared<SizeCostModel>());
  registry.register_model(std::make_shared<DepthCostModel>());
  return registry;
}

} // namespace eqsat
