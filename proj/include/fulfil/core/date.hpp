#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace fulfil::core {

/// Calendar date backed by days since the Unix epoch.
class Date {
 public:
  constexpr Date() = default;
  explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int year, unsigned month, unsigned day);

  /// Strict ISO-8601 "YYYY-MM-DD". Throws std::invalid_argument.
  static Date parse(std::string_view text);

  std::chrono::sys_days sys_days() const { return days_; }
  std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{days_}; }
  int year() const { return static_cast<int>(ymd().year()); }
  unsigned month() const { return static_cast<unsigned>(ymd().month()); }
  unsigned day() const { return static_cast<unsigned>(ymd().day()); }

  Date plus_days(long n) const { return Date{days_ + std::chrono::days{n}}; }
  /// this - other, in days.
  long days_since(Date other) const { return (days_ - other.days_).count(); }

  std::string to_string() const;

  auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace fulfil::core
