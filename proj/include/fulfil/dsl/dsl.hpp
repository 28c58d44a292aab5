#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fulfil/dsl/ast.hpp"
#include "fulfil/opt/model.hpp"
#include "fulfil/opt/plan_store.hpp"
#include "fulfil/query/engine.hpp"

namespace fulfil::dsl {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  int line_;
  int column_;
};

/// Type errors, unbound names, division by zero, failing host calls.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejects anything outside the snippet grammar, including references to
/// host names that are not on the whitelist.
Script parse_script(std::string_view text);

/// Host calls that can change model or plan state.
bool mutates(const Script& script);
/// Names of every host function/attribute the script references.
std::set<std::string> host_names(const Script& script);

struct Hosts {
  const query::TableStore* store = nullptr;
  opt::Model* model = nullptr;
  opt::PlanStore* plan = nullptr;
};

struct ExecEnv {
  std::map<std::string, Value> bindings;
  Hosts hosts;
  long step_budget = 10000;
  std::vector<std::string> log;
};

enum class Status { Ok, ParseError, RuntimeError, BudgetExceeded };
std::string to_string(Status s);

struct ExecutionResult {
  Status status = Status::Ok;
  std::vector<std::string> logs;
  std::optional<std::string> error_detail;
};

/// Runs `script` against `env`. Logs emitted before a failure are kept.
ExecutionResult execute(const Script& script, ExecEnv& env);
/// parse_script + execute; parse failures become Status::ParseError.
ExecutionResult run_snippet(std::string_view text, ExecEnv& env);

/// Replaces every `{expr}` hole with its rendering; `{{` and `}}` are literal
/// braces. Throws ParseError for malformed holes, RuntimeError for unbound
/// names.
std::string interpolate(std::string_view tmpl, ExecEnv& env);

}  // namespace fulfil::dsl
