#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "fulfil/opt/model.hpp"

namespace fulfil::opt {

class CommitError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The `plan` host object: the committed plan and its append-only history.
class PlanStore {
 public:
  const std::optional<Plan>& current() const { return current_; }
  const std::vector<Plan>& history() const { return history_; }
  int version() const { return current_ ? current_->version : 0; }

  bool operator==(const PlanStore&) const = default;

 private:
  friend const Plan& update_plan(PlanStore& store, const SolveOutcome& outcome);

  std::optional<Plan> current_;
  std::vector<Plan> history_;
};

/// Commits the outcome's assignment as the next plan version.
/// Throws CommitError when the outcome is infeasible.
const Plan& update_plan(PlanStore& store, const SolveOutcome& outcome);

nlohmann::json to_json(const core::PlanLine& line);
nlohmann::json to_json(const Plan& plan);
nlohmann::json to_json(const SolveOutcome& outcome);
nlohmann::json to_json(const Constraint& c);

}  // namespace fulfil::opt
