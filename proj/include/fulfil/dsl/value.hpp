#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fulfil/query/value.hpp"

namespace fulfil::dsl {

/// Exact decimal from the data layer or optimizer (query DECIMAL columns,
/// STDDEV/AVG results, objVal). Renders with minimal digits.
struct Decimal {
  double v = 0;
  bool operator==(const Decimal&) const = default;
};

/// Snippet runtime value. `double` is a float produced by `/` or a literal
/// like 1.5; it always renders with a fractional digit.
struct Value {
  using List = std::vector<Value>;
  std::variant<std::monostate, bool, std::int64_t, Decimal, double, std::string, List> data;

  Value() = default;
  Value(bool b) : data(b) {}
  Value(std::int64_t v) : data(v) {}
  Value(int v) : data(std::int64_t{v}) {}
  Value(Decimal v) : data(v) {}
  Value(double v) : data(v) {}
  Value(std::string v) : data(std::move(v)) {}
  Value(const char* v) : data(std::string(v)) {}
  Value(List v) : data(std::move(v)) {}

  bool is_none() const { return std::holds_alternative<std::monostate>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_decimal() const { return std::holds_alternative<Decimal>(data); }
  bool is_float() const { return std::holds_alternative<double>(data); }
  bool is_number() const { return is_bool() || is_int() || is_decimal() || is_float(); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_list() const { return std::holds_alternative<List>(data); }

  std::int64_t as_int() const { return is_bool() ? std::get<bool>(data) : std::get<std::int64_t>(data); }
  double as_double() const;
  const std::string& as_string() const { return std::get<std::string>(data); }
  const List& as_list() const { return std::get<List>(data); }

  bool operator==(const Value&) const = default;
};

/// A singleton list stands for its element in scalar positions.
const Value& scalar(const Value& v);

bool truthy(const Value& v);
std::string type_name(const Value& v);

/// Canonical text used by logger.log and f-string holes: integers without a
/// decimal point, decimals with at most 4 fraction digits and no trailing
/// zeros, floats with at least one fraction digit, None, True/False, and
/// Python-style lists. A singleton list renders as its element.
std::string render(const Value& v);

Value from_query(const query::Value& v);

}  // namespace fulfil::dsl
