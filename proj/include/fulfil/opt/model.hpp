#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fulfil/core/model_ops.hpp"
#include "fulfil/core/types.hpp"

namespace fulfil::opt {

using core::Constraint;
using core::Fixed;
using core::Instance;
using core::Plan;

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<core::Violation> violations);
  const std::vector<core::Violation>& violations() const { return violations_; }

 private:
  std::vector<core::Violation> violations_;
};

class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ModelError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct SolveOutcome {
  bool feasible = false;
  /// Present iff feasible.
  std::optional<Fixed> objective;
  /// Candidate plan (version 0) present iff feasible.
  std::optional<Plan> assignment;
  long nodes_explored = 0;

  bool operator==(const SolveOutcome&) const = default;
};

/// Exact minimum-cost assignment of every demand to one (supplier, method,
/// ship week) under the given constraints and per-(supplier, week) inventory.
/// Depth-first branch-and-bound over demands in descending rack order.
/// Equal-cost optima are broken lexicographically by (demand id, supplier id,
/// method name, ship week).
SolveOutcome solve(const Instance& instance, std::span<const Constraint> constraints);

enum class Scope { Baseline, Scenario };

/// The `model` host object: an instance plus baseline and scenario
/// constraints and the outcome of the latest solve. Copyable value type; the
/// instance itself is shared and immutable.
class Model {
 public:
  /// Throws ValidationError if the instance violates any invariant.
  explicit Model(std::shared_ptr<const Instance> instance);

  const Instance& instance() const { return *instance_; }
  const std::shared_ptr<const Instance>& instance_ptr() const { return instance_; }

  /// Throws ConstraintError for references to unknown ids or methods.
  void add_constraint(Constraint c, Scope scope);
  /// Drops all scenario constraints.
  void reset();
  /// Moves scenario constraints into the baseline.
  void commit_scenario();

  const SolveOutcome& optimize();

  const std::vector<Constraint>& baseline_constraints() const { return baseline_; }
  const std::vector<Constraint>& scenario_constraints() const { return scenario_; }
  std::vector<Constraint> active_constraints() const;

  const std::optional<SolveOutcome>& last_outcome() const { return last_outcome_; }
  /// True when last_outcome() was solved under the current active constraints.
  bool outcome_current() const { return last_outcome_.has_value() && !stale_; }
  /// Outcome of the latest optimize() run with no scenario constraints.
  const std::optional<SolveOutcome>& baseline_outcome() const { return baseline_outcome_; }

  bool operator==(const Model& other) const = default;

 private:
  void check(const Constraint& c) const;

  std::shared_ptr<const Instance> instance_;
  std::vector<Constraint> baseline_;
  std::vector<Constraint> scenario_;
  std::optional<SolveOutcome> last_outcome_;
  std::optional<SolveOutcome> baseline_outcome_;
  bool stale_ = true;
};

struct WhatIfResult {
  bool feasible = false;
  std::optional<Fixed> scenario_objective;
  std::optional<Fixed> delta_vs_baseline;
};

/// Solves with `scenario` added on top of the current constraints and reports
/// the change against the baseline objective. `model` is left exactly as it
/// was. Throws ModelError if the baseline has never been solved.
WhatIfResult what_if(Model& model, std::span<const Constraint> scenario);

}  // namespace fulfil::opt
