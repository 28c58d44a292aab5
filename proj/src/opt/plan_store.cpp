#include "fulfil/opt/plan_store.hpp"

namespace fulfil::opt {

const Plan& update_plan(PlanStore& store, const SolveOutcome& outcome) {
  if (!outcome.feasible || !outcome.assignment) {
    throw CommitError("cannot commit an infeasible plan");
  }
  Plan plan = *outcome.assignment;
  plan.version = store.version() + 1;
  store.history_.push_back(plan);
  store.current_ = std::move(plan);
  return *store.current_;
}

nlohmann::json to_json(const core::PlanLine& line) {
  return {{"demand_id", line.demand_id},     {"supplier_id", line.supplier_id},
          {"method", line.method},           {"ship_week", line.ship_week},
          {"dock_week", line.dock_week},     {"line_cost", line.line_cost.to_double()}};
}

nlohmann::json to_json(const Plan& plan) {
  nlohmann::json lines = nlohmann::json::array();
  for (const auto& l : plan.lines) lines.push_back(to_json(l));
  return {{"version", plan.version}, {"total_cost", plan.total_cost.to_double()}, {"lines", lines}};
}

nlohmann::json to_json(const SolveOutcome& outcome) {
  nlohmann::json j = {{"feasible", outcome.feasible}, {"nodes_explored", outcome.nodes_explored}};
  j["objective"] = outcome.objective ? nlohmann::json(outcome.objective->to_double()) : nlohmann::json();
  if (outcome.assignment) j["assignment"] = to_json(*outcome.assignment);
  return j;
}

nlohmann::json to_json(const Constraint& c) {
  nlohmann::json j = {{"kind", core::to_string(c.kind)},
                      {"demand_id", c.demand_id},
                      {"week_or_pattern", core::to_string(c.week_or_pattern)},
                      {"enforce", core::to_string(c.enforce)}};
  if (c.kind == core::ConstraintKind::SupplyPairing) j["supplier_id"] = c.supplier_id;
  if (c.kind == core::ConstraintKind::ShippingMethod) j["method"] = c.method;
  return j;
}

}  // namespace fulfil::opt
