#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fulfil/core/date.hpp"
#include "fulfil/core/fixed.hpp"

namespace fulfil::core {

using Week = int;

inline constexpr std::string_view kWildcard = "*";

struct Demand {
  std::string id;
  int racks = 1;
  Week ideal_dock_week = 0;
  std::string dest_geo;
};

struct Supplier {
  std::string id;
  std::string region;
  std::string src_geo;
};

struct InventoryRecord {
  std::string supplier_id;
  Week week = 0;
  std::int64_t quantity = 0;
  Date record_date;
};

struct ShippingMethod {
  std::string name;
  int lead_time_weeks = 0;
  Fixed cost_per_rack;
  Fixed cross_geo_multiplier = Fixed::from_int(1);
};

struct ShipmentRecord {
  Date date;
  std::int64_t quantity = 1;
  std::string src_geo;
  std::string dest_geo;
  std::string method;
};

struct Horizon {
  int num_weeks = 1;
  Date week0_start;

  Date week_start(Week w) const { return week0_start.plus_days(7L * w); }
  /// Week containing `d`; negative when d precedes week 0.
  Week week_of(Date d) const;
};

/// Per-rack-per-week deviation penalties around the ideal dock week.
struct CostConfig {
  Fixed lateness_penalty_per_week;
  Fixed earliness_penalty_per_week;
};

struct Instance {
  std::string name;
  std::vector<Demand> demands;
  std::vector<Supplier> suppliers;
  std::vector<InventoryRecord> inventory;
  std::vector<ShipmentRecord> shipments;
  std::vector<ShippingMethod> methods;
  Horizon horizon;
  CostConfig cost;
  /// Clock for NOW() in queries.
  Date now;

  const Demand* find_demand(std::string_view id) const;
  const Supplier* find_supplier(std::string_view id) const;
  const ShippingMethod* find_method(std::string_view name) const;
};

// ---------------------------------------------------------------------------
// Constraints

enum class ConstraintKind { DockDate, SupplyPairing, ShippingMethod };
enum class Enforce { ExactMatch, Prohibit };

struct AnyWeek {
  auto operator<=>(const AnyWeek&) const = default;
};
struct MonthPattern {
  int year = 0;
  unsigned month = 1;
  auto operator<=>(const MonthPattern&) const = default;
};
using WeekPattern = std::variant<AnyWeek, Week, MonthPattern>;

class PatternError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "*", a week index ("3"), or a month pattern "YYYY-MM-*" / "YYYY-M-*".
WeekPattern parse_week_pattern(std::string_view text);
std::string to_string(const WeekPattern& p);

struct Constraint {
  ConstraintKind kind = ConstraintKind::DockDate;
  std::string demand_id{kWildcard};
  std::string supplier_id{kWildcard};
  WeekPattern week_or_pattern = AnyWeek{};
  std::string method;
  Enforce enforce = Enforce::ExactMatch;

  bool operator==(const Constraint&) const = default;
};

std::string to_string(ConstraintKind k);
std::string to_string(Enforce e);
/// Accepts exactly "Exact Match" or "Prohibit".
Enforce parse_enforce(std::string_view text);

// ---------------------------------------------------------------------------
// Plans

struct PlanLine {
  std::string demand_id;
  std::string supplier_id;
  std::string method;
  Week ship_week = 0;
  Week dock_week = 0;
  Fixed line_cost;

  bool operator==(const PlanLine&) const = default;
};

struct Plan {
  std::vector<PlanLine> lines;
  Fixed total_cost;
  int version = 0;

  bool operator==(const Plan&) const = default;
};

}  // namespace fulfil::core
