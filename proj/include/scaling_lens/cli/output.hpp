#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace scaling_lens::cli {

using Cell = std::variant<double, std::uint64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// 17 significant digits; throws NumericError for NaN or infinity.
std::string format_real(double v);

/// RFC-4180 CSV with CRLF-free "\n" line ends and quoting where needed.
void write_csv(std::ostream& out, const Table& table);
std::string to_csv(const Table& table);

/// Array of row objects keyed by column name.
nlohmann::ordered_json to_json(const Table& table);

/// Reads a CSV written by write_csv (header plus rows of plain fields).
Table read_csv(std::istream& in);

}  // namespace scaling_lens::cli
