#include "scaling_lens/cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "scaling_lens/errors.hpp"

namespace scaling_lens::cli {
namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_real(*d);
  if (const std::uint64_t* u = std::get_if<std::uint64_t>(&c)) return std::to_string(*u);
  return quote(std::get<std::string>(c));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw NumericError("Table: row width does not match the header");
  }
  rows.push_back(std::move(row));
}

std::string format_real(double v) {
  if (!std::isfinite(v)) throw NumericError("refusing to write a non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << quote(table.columns[i]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << cell_text(row[i]);
    }
    out << '\n';
  }
}

std::string to_csv(const Table& table) {
  std::ostringstream s;
  write_csv(s, table);
  return s.str();
}

nlohmann::ordered_json to_json(const Table& table) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Cell& c = row[i];
      if (const double* d = std::get_if<double>(&c)) {
        format_real(*d);
        obj[table.columns[i]] = *d;
      } else if (const std::uint64_t* u = std::get_if<std::uint64_t>(&c)) {
        obj[table.columns[i]] = *u;
      } else {
        obj[table.columns[i]] = std::get<std::string>(c);
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("CSV: missing header");
  t.columns = split_csv_line(line);
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != t.columns.size()) {
      throw ValidationError("CSV line " + std::to_string(n) + ": expected " +
                            std::to_string(t.columns.size()) + " fields");
    }
    std::vector<Cell> row(fields.begin(), fields.end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace scaling_lens::cli
