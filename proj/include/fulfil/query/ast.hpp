#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fulfil/query/value.hpp"

namespace fulfil::query {

enum class Aggregate { None, Sum, Avg, Count, Min, Max, Stddev };
enum class CompareOp { Eq, Ne, Ge, Le, Gt, Lt };

struct SelectItem {
  Aggregate aggregate = Aggregate::None;
  /// Column name, or "*".
  std::string column;

  bool operator==(const SelectItem&) const = default;
};

/// NOW() - INTERVAL 'weeks weeks'; weeks == 0 is plain NOW().
struct NowMinusWeeks {
  std::int64_t weeks = 0;
  bool operator==(const NowMinusWeeks&) const = default;
};

/// Another column of the same row, e.g. `src_geo != dest_geo`.
struct ColumnRef {
  std::string name;
  bool operator==(const ColumnRef&) const = default;
};

struct Condition {
  std::string column;
  CompareOp op = CompareOp::Eq;
  /// Literal (null, integer, decimal, string), a date expression, or a column.
  std::variant<Value, NowMinusWeeks, ColumnRef> rhs;

  bool operator==(const Condition&) const = default;
};

/// SELECT items FROM table [WHERE cond AND cond ...]
struct QueryAst {
  std::vector<SelectItem> items;
  std::string table;
  std::vector<Condition> where;

  bool operator==(const QueryAst&) const = default;
};

std::string to_string(Aggregate a);
std::string to_string(CompareOp op);
/// Canonical SQL text; parse(print(ast)) == ast.
std::string print(const QueryAst& ast);

}  // namespace fulfil::query
