#include "vecmag/table_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "vecmag/errors.hpp"

namespace vecmag {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw DimensionMismatch("table row has " + std::to_string(row.size()) + " cells, expected " +
                            std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw InvalidArgument("table has no column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
  return parse_number(rows.at(row).at(column(name)));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidArgument("not a number: '" + text + "'");
  }
  return v;
}

void write_table(std::ostream& os, const Table& table) {
  if (!table.metadata.empty()) os << "# " << table.metadata.dump() << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

Table read_table(std::istream& is) {
  Table t;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header && !line.empty() && line[0] == '#') {
      const auto start = line.find_first_not_of("# ");
      if (start == std::string::npos) continue;
      const auto j = nlohmann::json::parse(line.substr(start));
      if (!j.is_object()) throw InvalidArgument("metadata line is not a JSON object");
      t.metadata.update(j);
      continue;
    }
    if (!header) {
      t.columns = split_csv(line);
      header = true;
      continue;
    }
    if (line.empty()) continue;
    t.add_row(split_csv(line));
  }
  if (!header) throw InvalidArgument("table has no header row");
  return t;
}

}  // namespace vecmag
