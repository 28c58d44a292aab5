#pragma once

#include <string>
#include <vector>

#include "fulfil/core/types.hpp"

namespace fulfil::core {

Week dock_week(Week ship_week, const ShippingMethod& method);

/// Shipping cost (with cross-geo multiplier when the supplier's warehouse geo
/// differs from the demand's destination) plus the per-rack deviation penalty
/// between the resulting dock week and the ideal dock week.
Fixed line_cost(const Demand& demand, const Supplier& supplier, const ShippingMethod& method,
                Week ship_week, const CostConfig& cfg);

bool week_matches(const WeekPattern& pattern, Week w, const Horizon& horizon);

/// True iff `c` selects `line`: ids match (wildcards match anything), the
/// method matches for ShippingMethod constraints, and the dock week (DockDate)
/// or ship week (SupplyPairing, ShippingMethod) matches the week pattern.
bool constraint_matches(const Constraint& c, const PlanLine& line, const Horizon& horizon);

/// Whether `c` restricts lines of this demand at all (demand id or wildcard).
bool constraint_targets(const Constraint& c, std::string_view demand_id);

/// A line is admissible under `c` if it is not prohibited by it, and, for an
/// Exact Match constraint targeting the line's demand, it matches.
bool line_admissible(const Constraint& c, const PlanLine& line, const Horizon& horizon);

/// Builds the line for (demand, supplier, method, ship_week) with its cost.
PlanLine make_line(const Demand& d, const Supplier& s, const ShippingMethod& m, Week ship_week,
                   const CostConfig& cfg);

struct Violation {
  std::string where;
  std::string message;

  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_instance(const Instance& instance);

}  // namespace fulfil::core
