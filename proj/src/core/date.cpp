#include "fulfil/core/date.hpp"

#include <cstdio>
#include <stdexcept>

namespace fulfil::core {

Date::Date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok()) throw std::invalid_argument("invalid calendar date");
  days_ = std::chrono::sys_days{ymd};
}

Date Date::parse(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("invalid date '" + std::string(text) + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail();
  auto digits = [&](std::size_t from, std::size_t n) {
    int v = 0;
    for (std::size_t i = from; i < from + n; ++i) {
      if (text[i] < '0' || text[i] > '9') fail();
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  int y = digits(0, 4);
  int m = digits(5, 2);
  int d = digits(8, 2);
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) fail();
  return Date{std::chrono::sys_days{ymd}};
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
  return buf;
}

}  // namespace fulfil::core
