#include <cmath>
#include <cstdio>

#include "fulfil/core/instance_io.hpp"
#include "fulfil/query/engine.hpp"

namespace fulfil::query {

std::string debug_string(const Value& v) {
  if (v.is_null()) return "NULL";
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_decimal()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.as_double());
    return buf;
  }
  if (v.is_string()) return "'" + v.as_string() + "'";
  if (v.is_date()) return v.as_date().to_string();
  std::string out = "[";
  const auto& list = v.as_list();
  for (std::size_t i = 0; i < list.size(); ++i) out += (i ? ", " : "") + debug_string(list[i]);
  return out + "]";
}

nlohmann::json to_json(const Value& v) {
  if (v.is_null()) return nullptr;
  if (v.is_int()) return v.as_int();
  if (v.is_decimal()) return v.as_double();
  if (v.is_string()) return v.as_string();
  if (v.is_date()) return v.as_date().to_string();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : v.as_list()) arr.push_back(to_json(e));
  return arr;
}

int Table::column_index(std::string_view name) const {
  std::string resolved(name);
  if (auto it = aliases.find(resolved); it != aliases.end()) resolved = it->second;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == resolved) return static_cast<int>(i);
  }
  return -1;
}

const Table* TableStore::find(std::string_view name) const {
  auto it = tables.find(std::string(name));
  return it == tables.end() ? nullptr : &it->second;
}

TableStore TableStore::from_instance(const core::Instance& inst) {
  using T = ColumnType;
  TableStore store;
  store.now = inst.now;

  Table& demand = store.tables["demand"];
  demand.columns = {{"id", T::String}, {"racks", T::Integer}, {"ideal_dock_week", T::Integer}, {"dest_geo", T::String}};
  demand.aliases = {{"idd", "ideal_dock_week"}};
  for (const auto& d : inst.demands) {
    demand.rows.push_back({d.id, std::int64_t{d.racks}, std::int64_t{d.ideal_dock_week}, d.dest_geo});
  }

  Table& supplier = store.tables["supplier"];
  supplier.columns = {{"id", T::String}, {"region", T::String}, {"src_geo", T::String}};
  for (const auto& s : inst.suppliers) supplier.rows.push_back({s.id, s.region, s.src_geo});

  Table& inventory = store.tables["inventory"];
  inventory.columns = {{"supplier_id", T::String}, {"week", T::Integer}, {"quantity", T::Integer}, {"record_date", T::Date}};
  for (const auto& r : inst.inventory) {
    inventory.rows.push_back({r.supplier_id, std::int64_t{r.week}, r.quantity, r.record_date});
  }

  Table& shipment = store.tables["shipment"];
  shipment.columns = {{"date", T::Date}, {"quantity", T::Integer}, {"src_geo", T::String}, {"dest_geo", T::String}, {"method", T::String}};
  for (const auto& s : inst.shipments) {
    shipment.rows.push_back({s.date, s.quantity, s.src_geo, s.dest_geo, s.method});
  }
  return store;
}

TableStore load_store(const std::filesystem::path& dir, std::optional<core::Date> now_override) {
  return TableStore::from_instance(core::load_instance(dir, now_override));
}

namespace {

bool is_numeric(ColumnType t) { return t == ColumnType::Integer || t == ColumnType::Decimal; }

template <typename A>
bool apply(CompareOp op, const A& a, const A& b) {
  switch (op) {
    case CompareOp::Eq:
      return a == b;
    case CompareOp::Ne:
      return a != b;
    case CompareOp::Ge:
      return a >= b;
    case CompareOp::Le:
      return a <= b;
    case CompareOp::Gt:
      return a > b;
    case CompareOp::Lt:
      return a < b;
  }
  return false;
}

/// A WHERE condition bound to a column index with its right-hand side
/// converted to the column's type.
struct BoundCondition {
  int index;
  CompareOp op;
  Value rhs;  // null never matches
  int rhs_index = -1;  // column-to-column comparison when >= 0
};

BoundCondition bind(const Condition& c, const Table& table, const std::string& table_name, core::Date now) {
  int idx = table.column_index(c.column);
  if (idx < 0) throw QueryError("unknown column '" + c.column + "' in table '" + table_name + "'");
  ColumnType type = table.columns[idx].type;
  auto mismatch = [&](const std::string& what) {
    return QueryError("type mismatch: cannot compare column '" + c.column + "' with " + what);
  };

  if (const auto* expr = std::get_if<NowMinusWeeks>(&c.rhs)) {
    if (type != ColumnType::Date) throw mismatch("a date expression");
    return {idx, c.op, Value{now.plus_days(-7 * expr->weeks)}};
  }
  if (const auto* col = std::get_if<ColumnRef>(&c.rhs)) {
    int other = table.column_index(col->name);
    if (other < 0) throw QueryError("unknown column '" + col->name + "' in table '" + table_name + "'");
    ColumnType other_type = table.columns[other].type;
    if (!(type == other_type || (is_numeric(type) && is_numeric(other_type)))) {
      throw mismatch("column '" + col->name + "'");
    }
    return {idx, c.op, Value{}, other};
  }
  const Value& lit = std::get<Value>(c.rhs);
  if (lit.is_null()) return {idx, c.op, Value{}};
  if (is_numeric(type)) {
    if (!lit.is_number()) throw mismatch("a string");
    return {idx, c.op, lit};
  }
  if (type == ColumnType::String) {
    if (!lit.is_string()) throw mismatch("a number");
    return {idx, c.op, lit};
  }
  if (!lit.is_string()) throw mismatch("a number");
  try {
    return {idx, c.op, Value{core::Date::parse(lit.as_string())}};
  } catch (const std::invalid_argument&) {
    throw mismatch("non-date string '" + lit.as_string() + "'");
  }
}

bool satisfies(const std::vector<Value>& row, const BoundCondition& c) {
  const Value& cell = row[c.index];
  const Value& rhs = c.rhs_index >= 0 ? row[c.rhs_index] : c.rhs;
  if (cell.is_null() || rhs.is_null()) return false;
  if (cell.is_int() && rhs.is_int()) return apply(c.op, cell.as_int(), rhs.as_int());
  if (cell.is_number()) return apply(c.op, cell.as_double(), rhs.as_double());
  if (cell.is_string()) return apply(c.op, cell.as_string(), rhs.as_string());
  return apply(c.op, cell.as_date(), rhs.as_date());
}

Value aggregate(Aggregate agg, ColumnType type, const std::vector<const Value*>& cells) {
  std::vector<const Value*> present;
  for (const Value* v : cells)
    if (!v->is_null()) present.push_back(v);
  if (agg == Aggregate::Count) return Value{static_cast<std::int64_t>(present.size())};
  if (present.empty()) return Value{};

  if (agg == Aggregate::Min || agg == Aggregate::Max) {
    const Value* best = present.front();
    for (const Value* v : present) {
      bool less;
      if (type == ColumnType::Integer) less = v->as_int() < best->as_int();
      else if (type == ColumnType::Decimal) less = v->as_double() < best->as_double();
      else if (type == ColumnType::String) less = v->as_string() < best->as_string();
      else less = v->as_date() < best->as_date();
      if (agg == Aggregate::Min ? less : (!less && *v != *best)) best = v;
    }
    return *best;
  }

  const double n = static_cast<double>(present.size());
  if (type == ColumnType::Integer) {
    std::int64_t sum = 0;
    for (const Value* v : present) sum += v->as_int();
    if (agg == Aggregate::Sum) return Value{sum};
    double mean = static_cast<double>(sum) / n;
    if (agg == Aggregate::Avg) return Value{mean};
    double ss = 0;
    for (const Value* v : present) {
      double d = static_cast<double>(v->as_int()) - mean;
      ss += d * d;
    }
    return Value{std::sqrt(ss / n)};
  }
  double sum = 0;
  for (const Value* v : present) sum += v->as_double();
  if (agg == Aggregate::Sum) return Value{sum};
  double mean = sum / n;
  if (agg == Aggregate::Avg) return Value{mean};
  double ss = 0;
  for (const Value* v : present) {
    double d = v->as_double() - mean;
    ss += d * d;
  }
  return Value{std::sqrt(ss / n)};
}

}  // namespace

Value eval_query(const QueryAst& ast, const TableStore& store) {
  const Table* table = store.find(ast.table);
  if (!table) throw QueryError("unknown table '" + ast.table + "'");

  std::vector<BoundCondition> conds;
  for (const auto& c : ast.where) conds.push_back(bind(c, *table, ast.table, store.now));

  // Resolve select items.
  struct Resolved {
    Aggregate agg;
    int index;  // -1 for COUNT(*) / *
  };
  std::vector<Resolved> items;
  bool any_agg = false;
  bool any_plain = false;
  for (const auto& it : ast.items) {
    (it.aggregate == Aggregate::None ? any_plain : any_agg) = true;
    if (it.column == "*") {
      items.push_back({it.aggregate, -1});
      continue;
    }
    int idx = table->column_index(it.column);
    if (idx < 0) throw QueryError("unknown column '" + it.column + "' in table '" + ast.table + "'");
    ColumnType type = table->columns[idx].type;
    bool numeric_only = it.aggregate == Aggregate::Sum || it.aggregate == Aggregate::Avg ||
                        it.aggregate == Aggregate::Stddev;
    if (numeric_only && !is_numeric(type)) {
      throw QueryError("type mismatch: " + to_string(it.aggregate) + " over non-numeric column '" +
                       it.column + "'");
    }
    items.push_back({it.aggregate, idx});
  }
  if (any_agg && any_plain) throw QueryError("cannot mix aggregates and plain columns without GROUP BY");

  std::vector<const std::vector<Value>*> rows;
  for (const auto& row : table->rows) {
    bool keep = true;
    for (const auto& c : conds) keep = keep && satisfies(row, c);
    if (keep) rows.push_back(&row);
  }

  if (any_agg) {
    Value::List results;
    for (const auto& it : items) {
      if (it.index < 0) {
        results.push_back(Value{static_cast<std::int64_t>(rows.size())});
        continue;
      }
      std::vector<const Value*> cells;
      for (const auto* row : rows) cells.push_back(&(*row)[it.index]);
      results.push_back(aggregate(it.agg, table->columns[it.index].type, cells));
    }
    return results.size() == 1 ? results.front() : Value{std::move(results)};
  }

  bool single_column = items.size() == 1 && items.front().index >= 0;
  Value::List out;
  for (const auto* row : rows) {
    if (single_column) {
      out.push_back((*row)[items.front().index]);
      continue;
    }
    Value::List record;
    for (const auto& it : items) {
      if (it.index < 0) record.insert(record.end(), row->begin(), row->end());
      else record.push_back((*row)[it.index]);
    }
    out.push_back(Value{std::move(record)});
  }
  return Value{std::move(out)};
}

}  // namespace fulfil::query
