#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fulfil/core/types.hpp"

namespace fulfil::core {

class LoadError : public std::runtime_error {
 public:
  LoadError(std::string file, int row, const std::string& message);

  const std::string& file() const { return file_; }
  /// 1-based data row (header excluded); 0 when the error is not row-specific.
  int row() const { return row_; }

 private:
  std::string file_;
  int row_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC-4180-ish: comma separated, double-quoted fields, "" escapes a quote.
CsvTable parse_csv(std::string_view text, const std::string& file_name);

/// Reads demand.csv, supplier.csv, inventory.csv, shipment.csv, methods.csv,
/// horizon.json and cost_config.json from `dir`. `now_override` replaces the
/// clock stored in horizon.json.
Instance load_instance(const std::filesystem::path& dir,
                       std::optional<Date> now_override = std::nullopt);

}  // namespace fulfil::core
