#include "fulfil/core/model_ops.hpp"

#include <map>
#include <set>
#include <utility>

namespace fulfil::core {

Week dock_week(Week ship_week, const ShippingMethod& method) {
  return ship_week + method.lead_time_weeks;
}

Fixed line_cost(const Demand& demand, const Supplier& supplier, const ShippingMethod& method,
                Week ship_week, const CostConfig& cfg) {
  Fixed multiplier =
      supplier.src_geo != demand.dest_geo ? method.cross_geo_multiplier : Fixed::from_int(1);
  Fixed shipping = multiply(method.cost_per_rack * demand.racks, multiplier);
  int deviation = dock_week(ship_week, method) - demand.ideal_dock_week;
  Fixed penalty = deviation >= 0 ? cfg.lateness_penalty_per_week * deviation
                                 : cfg.earliness_penalty_per_week * -deviation;
  return shipping + penalty * demand.racks;
}

bool week_matches(const WeekPattern& pattern, Week w, const Horizon& horizon) {
  if (std::holds_alternative<AnyWeek>(pattern)) return true;
  if (const auto* week = std::get_if<Week>(&pattern)) return *week == w;
  const auto& month = std::get<MonthPattern>(pattern);
  Date start = horizon.week_start(w);
  return start.year() == month.year && start.month() == month.month;
}

namespace {

bool id_matches(std::string_view pattern, std::string_view id) {
  return pattern == kWildcard || pattern == id;
}

}  // namespace

bool constraint_targets(const Constraint& c, std::string_view demand_id) {
  return id_matches(c.demand_id, demand_id);
}

bool constraint_matches(const Constraint& c, const PlanLine& line, const Horizon& horizon) {
  if (!id_matches(c.demand_id, line.demand_id)) return false;
  switch (c.kind) {
    case ConstraintKind::DockDate:
      return week_matches(c.week_or_pattern, line.dock_week, horizon);
    case ConstraintKind::SupplyPairing:
      return id_matches(c.supplier_id, line.supplier_id) &&
             week_matches(c.week_or_pattern, line.ship_week, horizon);
    case ConstraintKind::ShippingMethod:
      return id_matches(c.method, line.method) &&
             week_matches(c.week_or_pattern, line.ship_week, horizon);
  }
  return false;
}

bool line_admissible(const Constraint& c, const PlanLine& line, const Horizon& horizon) {
  if (c.enforce == Enforce::Prohibit) return !constraint_matches(c, line, horizon);
  if (!constraint_targets(c, line.demand_id)) return true;
  return constraint_matches(c, line, horizon);
}

PlanLine make_line(const Demand& d, const Supplier& s, const ShippingMethod& m, Week ship_week,
                   const CostConfig& cfg) {
  return PlanLine{d.id, s.id, m.name, ship_week, dock_week(ship_week, m),
                  line_cost(d, s, m, ship_week, cfg)};
}

std::vector<Violation> validate_instance(const Instance& instance) {
  std::vector<Violation> out;
  auto add = [&](std::string where, std::string message) {
    out.push_back({std::move(where), std::move(message)});
  };

  if (instance.horizon.num_weeks < 1) add("horizon", "num_weeks must be >= 1");

  std::set<std::string> demand_ids;
  for (const auto& d : instance.demands) {
    std::string where = "demand " + d.id;
    if (d.id.empty() || d.id == kWildcard) add(where, "id must be a non-wildcard string");
    if (!demand_ids.insert(d.id).second) add(where, "duplicate demand id");
    if (d.racks < 1) add(where, "racks must be >= 1");
    if (d.ideal_dock_week < 0) add(where, "ideal_dock_week must be >= 0");
  }

  std::set<std::string> supplier_ids;
  for (const auto& s : instance.suppliers) {
    std::string where = "supplier " + s.id;
    if (s.id.empty() || s.id == kWildcard) add(where, "id must be a non-wildcard string");
    if (!supplier_ids.insert(s.id).second) add(where, "duplicate supplier id");
  }

  std::set<std::pair<std::string, Week>> inventory_keys;
  for (const auto& r : instance.inventory) {
    std::string where = "inventory " + r.supplier_id + "@" + std::to_string(r.week);
    if (r.quantity < 0) add(where, "quantity must be >= 0");
    if (r.week < 0) add(where, "week must be >= 0");
    if (!supplier_ids.contains(r.supplier_id)) add(where, "unknown supplier_id");
    if (!inventory_keys.insert({r.supplier_id, r.week}).second) {
      add(where, "duplicate (supplier_id, week)");
    }
  }

  std::set<std::string> method_names;
  for (const auto& m : instance.methods) {
    std::string where = "method " + m.name;
    if (!method_names.insert(m.name).second) add(where, "duplicate method name");
    if (m.lead_time_weeks < 0) add(where, "lead_time_weeks must be >= 0");
    if (m.cost_per_rack < Fixed{}) add(where, "cost_per_rack must be >= 0");
    if (m.cross_geo_multiplier < Fixed::from_int(1)) add(where, "cross_geo_multiplier must be >= 1");
  }
  if (const auto* priority = instance.find_method("priority")) {
    for (const auto& m : instance.methods) {
      if (m.name != "priority" && m.lead_time_weeks < priority->lead_time_weeks) {
        add("method priority", "lead time exceeds that of method " + m.name);
      }
    }
  }

  for (std::size_t i = 0; i < instance.shipments.size(); ++i) {
    if (instance.shipments[i].quantity < 1) {
      add("shipment row " + std::to_string(i + 1), "quantity must be >= 1");
    }
  }

  if (instance.cost.lateness_penalty_per_week < Fixed{} ||
      instance.cost.earliness_penalty_per_week < Fixed{}) {
    add("cost_config", "penalties must be >= 0");
  }
  return out;
}

}  // namespace fulfil::core
