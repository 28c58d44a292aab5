#include "fulfil/opt/model.hpp"

namespace fulfil::opt {

namespace {

std::string describe(const std::vector<core::Violation>& violations) {
  std::string out = "invalid instance:";
  for (const auto& v : violations) out += " [" + v.where + ": " + v.message + "]";
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<core::Violation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

Model::Model(std::shared_ptr<const Instance> instance) : instance_(std::move(instance)) {
  if (!instance_) throw std::invalid_argument("null instance");
  auto violations = core::validate_instance(*instance_);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

void Model::check(const Constraint& c) const {
  using core::kWildcard;
  if (c.demand_id.empty()) throw ConstraintError("constraint demand id is empty");
  if (c.demand_id != kWildcard && !instance_->find_demand(c.demand_id)) {
    throw ConstraintError("unknown demand '" + c.demand_id + "'");
  }
  if (c.kind == core::ConstraintKind::SupplyPairing && c.supplier_id != kWildcard &&
      !instance_->find_supplier(c.supplier_id)) {
    throw ConstraintError("unknown supplier '" + c.supplier_id + "'");
  }
  if (c.kind == core::ConstraintKind::ShippingMethod && c.method != kWildcard &&
      !instance_->find_method(c.method)) {
    throw ConstraintError("unknown shipping method '" + c.method + "'");
  }
  if (const auto* w = std::get_if<core::Week>(&c.week_or_pattern); w && *w < 0) {
    throw ConstraintError("week index must be >= 0");
  }
}

void Model::add_constraint(Constraint c, Scope scope) {
  check(c);
  (scope == Scope::Baseline ? baseline_ : scenario_).push_back(std::move(c));
  stale_ = true;
}

void Model::reset() {
  if (!scenario_.empty()) stale_ = true;
  scenario_.clear();
}

void Model::commit_scenario() {
  baseline_.insert(baseline_.end(), scenario_.begin(), scenario_.end());
  scenario_.clear();
  if (last_outcome_ && !stale_) baseline_outcome_ = last_outcome_;
}

std::vector<Constraint> Model::active_constraints() const {
  std::vector<Constraint> all = baseline_;
  all.insert(all.end(), scenario_.begin(), scenario_.end());
  return all;
}

const SolveOutcome& Model::optimize() {
  last_outcome_ = solve(*instance_, active_constraints());
  stale_ = false;
  if (scenario_.empty()) baseline_outcome_ = last_outcome_;
  return *last_outcome_;
}

WhatIfResult what_if(Model& model, std::span<const Constraint> scenario) {
  if (!model.baseline_outcome()) throw ModelError("what-if requires a solved baseline");
  Model saved = model;
  for (const auto& c : scenario) model.add_constraint(c, Scope::Scenario);

  WhatIfResult result;
  try {
    const SolveOutcome& outcome = model.optimize();
    result.feasible = outcome.feasible;
    result.scenario_objective = outcome.objective;
    if (outcome.feasible && model.baseline_outcome()->feasible) {
      result.delta_vs_baseline = *outcome.objective - *saved.baseline_outcome()->objective;
    }
  } catch (...) {
    model = std::move(saved);
    throw;
  }
  model = std::move(saved);
  return result;
}

}  // namespace fulfil::opt
