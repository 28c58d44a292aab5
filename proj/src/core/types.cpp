#include "fulfil/core/types.hpp"

#include <algorithm>
#include <charconv>

namespace fulfil::core {

Week Horizon::week_of(Date d) const {
  long delta = d.days_since(week0_start);
  long w = delta >= 0 ? delta / 7 : -((-delta + 6) / 7);
  return static_cast<Week>(w);
}

const Demand* Instance::find_demand(std::string_view id) const {
  auto it = std::find_if(demands.begin(), demands.end(), [&](const Demand& d) { return d.id == id; });
  return it == demands.end() ? nullptr : &*it;
}

const Supplier* Instance::find_supplier(std::string_view id) const {
  auto it =
      std::find_if(suppliers.begin(), suppliers.end(), [&](const Supplier& s) { return s.id == id; });
  return it == suppliers.end() ? nullptr : &*it;
}

const ShippingMethod* Instance::find_method(std::string_view name) const {
  auto it = std::find_if(methods.begin(), methods.end(),
                         [&](const ShippingMethod& m) { return m.name == name; });
  return it == methods.end() ? nullptr : &*it;
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

int to_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw PatternError("number out of range in pattern '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

WeekPattern parse_week_pattern(std::string_view text) {
  if (text == kWildcard) return AnyWeek{};
  if (all_digits(text)) return Week{to_int(text)};
  // YYYY-M-* or YYYY-MM-*
  if (text.size() >= 8 && text.size() <= 9 && text.substr(text.size() - 2) == "-*" &&
      text[4] == '-') {
    std::string_view year = text.substr(0, 4);
    std::string_view month = text.substr(5, text.size() - 7);
    if (all_digits(year) && all_digits(month)) {
      int m = to_int(month);
      if (m >= 1 && m <= 12) return MonthPattern{to_int(year), static_cast<unsigned>(m)};
    }
  }
  throw PatternError("malformed week pattern '" + std::string(text) + "'");
}

std::string to_string(const WeekPattern& p) {
  if (std::holds_alternative<AnyWeek>(p)) return std::string(kWildcard);
  if (const auto* w = std::get_if<Week>(&p)) return std::to_string(*w);
  const auto& m = std::get<MonthPattern>(p);
  std::string mm = std::to_string(m.month);
  if (mm.size() == 1) mm.insert(0, "0");
  return std::to_string(m.year) + "-" + mm + "-*";
}

std::string to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::DockDate:
      return "DockDate";
    case ConstraintKind::SupplyPairing:
      return "SupplyPairing";
    case ConstraintKind::ShippingMethod:
      return "ShippingMethod";
  }
  return "?";
}

std::string to_string(Enforce e) { return e == Enforce::ExactMatch ? "Exact Match" : "Prohibit"; }

Enforce parse_enforce(std::string_view text) {
  if (text == "Exact Match") return Enforce::ExactMatch;
  if (text == "Prohibit") return Enforce::Prohibit;
  throw std::invalid_argument("enforce must be \"Exact Match\" or \"Prohibit\", got \"" +
                              std::string(text) + "\"");
}

}  // namespace fulfil::core
