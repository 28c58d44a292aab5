#include "fulfil/core/instance_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fulfil::core {

LoadError::LoadError(std::string file, int row, const std::string& message)
    : std::runtime_error(file + (row > 0 ? ":" + std::to_string(row) : std::string()) + ": " +
                         message),
      file_(std::move(file)),
      row_(row) {}

CsvTable parse_csv(std::string_view text, const std::string& file_name) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  int line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    bool blank = record.size() == 1 && record[0].empty();
    if (!blank) {
      if (table.header.empty()) {
        table.header = std::move(record);
      } else {
        if (record.size() != table.header.size()) {
          throw LoadError(file_name, static_cast<int>(table.rows.size()) + 1,
                          "expected " + std::to_string(table.header.size()) + " fields, got " +
                              std::to_string(record.size()));
        }
        table.rows.push_back(std::move(record));
      }
    }
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw LoadError(file_name, 0, "stray quote on line " + std::to_string(line));
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw LoadError(file_name, 0, "unterminated quoted field");
  if (!field.empty() || !record.empty()) end_record();
  if (table.header.empty()) throw LoadError(file_name, 0, "missing header row");
  return table;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.filename().string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Column accessor over one CSV table with row-numbered error reporting.
class Rows {
 public:
  Rows(const std::filesystem::path& dir, std::string file,
       std::initializer_list<std::pair<const char*, const char*>> columns)
      : file_(std::move(file)), table_(parse_csv(read_file(dir / file_), file_)) {
    for (const auto& [name, alias] : columns) {
      int idx = find(name);
      if (idx < 0 && alias != nullptr) idx = find(alias);
      if (idx < 0) throw LoadError(file_, 0, std::string("missing column '") + name + "'");
      index_[name] = idx;
    }
  }

  std::size_t size() const { return table_.rows.size(); }

  const std::string& str(std::size_t row, const char* col) const {
    return table_.rows[row][index_.at(col)];
  }

  std::int64_t integer(std::size_t row, const char* col) const {
    const std::string& s = str(row, col);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      fail(row, std::string("bad integer in column '") + col + "': '" + s + "'");
    }
    return v;
  }

  Fixed decimal(std::size_t row, const char* col) const {
    try {
      return Fixed::parse(str(row, col));
    } catch (const std::invalid_argument& e) {
      fail(row, std::string("column '") + col + "': " + e.what());
    }
  }

  Date date(std::size_t row, const char* col) const {
    try {
      return Date::parse(str(row, col));
    } catch (const std::invalid_argument& e) {
      fail(row, std::string("column '") + col + "': " + e.what());
    }
  }

  [[noreturn]] void fail(std::size_t row, const std::string& message) const {
    throw LoadError(file_, static_cast<int>(row) + 1, message);
  }

 private:
  int find(const char* name) const {
    for (std::size_t i = 0; i < table_.header.size(); ++i) {
      if (table_.header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  std::string file_;
  CsvTable table_;
  std::map<std::string, int> index_;
};

Fixed json_decimal(const nlohmann::json& j, const std::string& file, const char* key) {
  if (!j.contains(key)) throw LoadError(file, 0, std::string("missing key '") + key + "'");
  const auto& v = j.at(key);
  try {
    if (v.is_string()) return Fixed::parse(v.get<std::string>());
    if (v.is_number_integer()) return Fixed::from_int(v.get<std::int64_t>());
    if (v.is_number()) return Fixed::from_double(v.get<double>());
  } catch (const std::invalid_argument& e) {
    throw LoadError(file, 0, std::string(key) + ": " + e.what());
  }
  throw LoadError(file, 0, std::string("key '") + key + "' must be a number");
}

nlohmann::json read_json(const std::filesystem::path& dir, const std::string& file) {
  try {
    return nlohmann::json::parse(read_file(dir / file));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(file, 0, e.what());
  }
}

}  // namespace

Instance load_instance(const std::filesystem::path& dir, std::optional<Date> now_override) {
  Instance inst;
  inst.name = std::filesystem::weakly_canonical(dir).filename().string();

  {
    Rows rows(dir, "demand.csv",
              {{"id", nullptr}, {"racks", nullptr}, {"ideal_dock_week", "idd"}, {"dest_geo", nullptr}});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      inst.demands.push_back(Demand{rows.str(i, "id"), static_cast<int>(rows.integer(i, "racks")),
                                    static_cast<Week>(rows.integer(i, "ideal_dock_week")),
                                    rows.str(i, "dest_geo")});
    }
  }
  {
    Rows rows(dir, "supplier.csv", {{"id", nullptr}, {"region", nullptr}, {"src_geo", nullptr}});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      inst.suppliers.push_back(
          Supplier{rows.str(i, "id"), rows.str(i, "region"), rows.str(i, "src_geo")});
    }
  }
  {
    Rows rows(dir, "inventory.csv",
              {{"supplier_id", nullptr}, {"week", nullptr}, {"quantity", nullptr}, {"record_date", nullptr}});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      inst.inventory.push_back(InventoryRecord{rows.str(i, "supplier_id"),
                                               static_cast<Week>(rows.integer(i, "week")),
                                               rows.integer(i, "quantity"), rows.date(i, "record_date")});
    }
  }
  {
    Rows rows(dir, "shipment.csv",
              {{"date", nullptr}, {"quantity", nullptr}, {"src_geo", nullptr}, {"dest_geo", nullptr}, {"method", nullptr}});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      inst.shipments.push_back(ShipmentRecord{rows.date(i, "date"), rows.integer(i, "quantity"),
                                              rows.str(i, "src_geo"), rows.str(i, "dest_geo"),
                                              rows.str(i, "method")});
    }
  }
  {
    Rows rows(dir, "methods.csv",
              {{"name", nullptr}, {"lead_time_weeks", nullptr}, {"cost_per_rack", nullptr}, {"cross_geo_multiplier", nullptr}});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      inst.methods.push_back(ShippingMethod{rows.str(i, "name"),
                                            static_cast<int>(rows.integer(i, "lead_time_weeks")),
                                            rows.decimal(i, "cost_per_rack"),
                                            rows.decimal(i, "cross_geo_multiplier")});
    }
  }

  {
    const std::string file = "horizon.json";
    auto j = read_json(dir, file);
    try {
      inst.horizon.num_weeks = j.at("num_weeks").get<int>();
      inst.horizon.week0_start = Date::parse(j.at("week0_start").get<std::string>());
      inst.now = j.contains("now") ? Date::parse(j.at("now").get<std::string>())
                                   : inst.horizon.week0_start;
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(file, 0, e.what());
    } catch (const std::invalid_argument& e) {
      throw LoadError(file, 0, e.what());
    }
  }
  {
    const std::string file = "cost_config.json";
    auto j = read_json(dir, file);
    inst.cost.lateness_penalty_per_week = json_decimal(j, file, "lateness_penalty_per_week");
    inst.cost.earliness_penalty_per_week = j.contains("earliness_penalty_per_week")
                                               ? json_decimal(j, file, "earliness_penalty_per_week")
                                               : inst.cost.lateness_penalty_per_week;
  }

  if (now_override) inst.now = *now_override;
  return inst;
}

}  // namespace fulfil::core
