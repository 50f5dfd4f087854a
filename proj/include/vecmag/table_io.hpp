#pragma once

// CSV tables preceded by `# {json}` metadata lines.

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace vecmag {

struct Table {
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

/// Shortest text that parses back to the same double; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);
double parse_number(const std::string& text);

void write_table(std::ostream& os, const Table& table);
Table read_table(std::istream& is);

}  // namespace vecmag
