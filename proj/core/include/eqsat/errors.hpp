#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace eqsat {

/// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in equation text or a pattern string; carries source position.
class ParseError : public Error {
public:
  ParseError(std::string msg, int line, int column)
      : Error(std::move(msg)), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_ = 0;
  int column_ = 0;
};

/// Well-formed text that does not describe a valid circuit (undefined or
/// redefined signals, combinational cycles, unassigned outputs).
class SemanticError : public Error {
public:
  using Error::Error;
};

/// simulate() was called with an assignment that misses an input.
class MissingInput : public Error {
public:
  explicit MissingInput(const std::string& input_name)
      : Error("missing value for input '" + input_name + "'"), input_(input_name) {}
  const std::string& input() const { return input_; }

private:
  std::string input_;
};

/// An ENode handed to EGraph::add references a class id the graph never issued.
class InvalidChildId : public Error {
public:
  using Error::Error;
};

/// A class id passed to an e-graph accessor is unknown.
class UnknownId : public Error {
public:
  using Error::Error;
};

/// A rule failed registration: malformed pattern, RHS variable not bound by
/// the LHS, or LHS and RHS are not Boolean-equivalent.
class RuleError : public Error {
public:
  using Error::Error;
};

/// A serialized e-graph violates the JSON schema; `where` names the offending
/// node or class id.
class SchemaError : public Error {
public:
  SchemaError(const std::string& msg, std::string where)
      : Error(msg + " (at " + where + ")"), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

private:
  std::string where_;
};

/// A selection misses a class reachable through its own choices.
class IncompleteSelection : public Error {
public:
  using Error::Error;
};

/// A selection's induced child relation contains a cycle.
class CyclicSelection : public Error {
public:
  using Error::Error;
};

/// No leaf-grounded selection exists for some root class.
class Unextractable : public Error {
public:
  using Error::Error;
};

/// brute_force_extract guard tripped: the selection space is too large.
class TooLarge : public Error {
public:
  using Error::Error;
};

/// An external cost evaluation failed; carries the captured output and the
/// candidate circuit (as equation text) that was being scored.
class EvaluatorFailure : public Error {
public:
  enum class Reason { Timeout, NonzeroExit, NoMatch, NotANumber };

  EvaluatorFailure(Reason reason, std::string msg, std::string output,
                   std::string candidate = {})
      : Error(std::move(msg)), reason_(reason), output_(std::move(output)),
        candidate_(std::move(candidate)) {}

  Reason reason() const { return reason_; }
  const std::string& output() const { return output_; }
  const std::string& candidate() const { return candidate_; }
  void set_candidate(std::string eqn) { candidate_ = std::move(eqn); }

private:
  Reason reason_;
  std::string output_;
  std::string candidate_;
};

/// Two circuits handed to the equivalence checker expose different interfaces.
class InterfaceMismatch : public Error {
public:
  using Error::Error;
};

/// A cost model with this name is already registered.
class DuplicateName : public Error {
public:
  using Error::Error;
};

/// No cost model with this name; the message lists the known ones.
class UnknownModel : public Error {
public:
  using Error::Error;
};

} // namespace eqsat
