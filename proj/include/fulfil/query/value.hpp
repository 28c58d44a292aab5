#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fulfil/core/date.hpp"

namespace fulfil::query {

/// Result cell or query result. Aggregates over zero rows are null, except
/// COUNT which is 0.
struct Value {
  using List = std::vector<Value>;
  using Data = std::variant<std::monostate, std::int64_t, double, std::string, core::Date, List>;

  Data data;

  Value() = default;
  Value(std::monostate) {}
  Value(std::int64_t v) : data(v) {}
  Value(int v) : data(std::int64_t{v}) {}
  Value(double v) : data(v) {}
  Value(std::string v) : data(std::move(v)) {}
  Value(const char* v) : data(std::string(v)) {}
  Value(core::Date v) : data(v) {}
  Value(List v) : data(std::move(v)) {}

  bool is_null() const { return std::holds_alternative<std::monostate>(data); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_decimal() const { return std::holds_alternative<double>(data); }
  bool is_number() const { return is_int() || is_decimal(); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_date() const { return std::holds_alternative<core::Date>(data); }
  bool is_list() const { return std::holds_alternative<List>(data); }

  std::int64_t as_int() const { return std::get<std::int64_t>(data); }
  double as_double() const { return is_int() ? static_cast<double>(as_int()) : std::get<double>(data); }
  const std::string& as_string() const { return std::get<std::string>(data); }
  core::Date as_date() const { return std::get<core::Date>(data); }
  const List& as_list() const { return std::get<List>(data); }

  bool operator==(const Value&) const = default;
};

std::string debug_string(const Value& v);
nlohmann::json to_json(const Value& v);

}  // namespace fulfil::query
