#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fulfil/core/types.hpp"
#include "fulfil/query/ast.hpp"

namespace fulfil::query {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, std::size_t offset, int token_index);

  /// Character offset into the query text.
  std::size_t offset() const { return offset_; }
  /// 1-based index of the offending token.
  int token_index() const { return token_index_; }

 private:
  std::size_t offset_;
  int token_index_;
};

/// Unknown table or column, or a comparison/aggregate applied to the wrong type.
class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

QueryAst parse_query(std::string_view text);

enum class ColumnType { Integer, Decimal, String, Date };

struct Column {
  std::string name;
  ColumnType type;
};

struct Table {
  std::vector<Column> columns;
  /// Alternative column names, e.g. idd -> ideal_dock_week.
  std::map<std::string, std::string> aliases;
  std::vector<std::vector<Value>> rows;

  /// Index of `name` (after alias resolution) or -1.
  int column_index(std::string_view name) const;
};

/// The in-memory tables behind `retrieve(...)`. Immutable once built.
struct TableStore {
  std::map<std::string, Table> tables;
  core::Date now;

  static TableStore from_instance(const core::Instance& instance);
  const Table* find(std::string_view name) const;
};

/// Reads the instance files in `dir` into a store. `now_override` replaces
/// the clock in horizon.json.
TableStore load_store(const std::filesystem::path& dir,
                      std::optional<core::Date> now_override = std::nullopt);

/// Single aggregate -> scalar; single plain column -> list of values; several
/// aggregates -> list of scalars; several columns or * -> list of row lists.
Value eval_query(const QueryAst& ast, const TableStore& store);

inline Value run_query(std::string_view text, const TableStore& store) {
  return eval_query(parse_query(text), store);
}

}  // namespace fulfil::query
