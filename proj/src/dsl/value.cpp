#include <cmath>
#include <cstdio>

#include "fulfil/dsl/value.hpp"

namespace fulfil::dsl {

double Value::as_double() const {
  if (is_decimal()) return std::get<Decimal>(data).v;
  if (is_float()) return std::get<double>(data);
  return static_cast<double>(as_int());
}

const Value& scalar(const Value& v) {
  if (v.is_list() && v.as_list().size() == 1) return scalar(v.as_list().front());
  return v;
}

bool truthy(const Value& v) {
  if (v.is_none()) return false;
  if (v.is_bool()) return std::get<bool>(v.data);
  if (v.is_int()) return v.as_int() != 0;
  if (v.is_decimal() || v.is_float()) return v.as_double() != 0.0;
  if (v.is_string()) return !v.as_string().empty();
  return !v.as_list().empty();
}

std::string type_name(const Value& v) {
  if (v.is_none()) return "None";
  if (v.is_bool()) return "bool";
  if (v.is_int()) return "int";
  if (v.is_decimal()) return "decimal";
  if (v.is_float()) return "float";
  if (v.is_string()) return "str";
  return "list";
}

namespace {

std::string fixed4(double d, bool keep_fraction) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", d);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') {
    if (keep_fraction) s += '0';
    else s.pop_back();
  }
  if (s == "-0" || s == "-0.0") s.erase(0, 1);
  return s;
}

std::string repr(const Value& v) {
  if (v.is_string()) {
    std::string out = "'";
    for (char c : v.as_string()) {
      if (c == '\'' || c == '\\') out += '\\';
      out += c;
    }
    return out + "'";
  }
  if (v.is_list()) {
    std::string out = "[";
    const auto& items = v.as_list();
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + repr(items[i]);
    return out + "]";
  }
  return render(v);
}

}  // namespace

std::string render(const Value& value) {
  const Value& v = scalar(value);
  if (v.is_none()) return "None";
  if (v.is_bool()) return std::get<bool>(v.data) ? "True" : "False";
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_decimal()) return fixed4(v.as_double(), false);
  if (v.is_float()) {
    double d = v.as_double();
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    return fixed4(d, true);
  }
  if (v.is_string()) return v.as_string();
  return repr(v);
}

Value from_query(const query::Value& v) {
  if (v.is_null()) return Value{};
  if (v.is_int()) return Value{v.as_int()};
  if (v.is_decimal()) return Value{Decimal{v.as_double()}};
  if (v.is_string()) return Value{v.as_string()};
  if (v.is_date()) return Value{v.as_date().to_string()};
  Value::List out;
  for (const auto& e : v.as_list()) out.push_back(from_query(e));
  return Value{std::move(out)};
}

}  // namespace fulfil::dsl
