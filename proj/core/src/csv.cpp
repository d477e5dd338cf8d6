#include "pcond/csv.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pcond/errors.hpp"

namespace pcond {

std::string format_double(double x) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    double back = 0.0;
    auto [ptr, ec] = std::from_chars(buf, buf + std::strlen(buf), back);
    if (ec == std::errc() && ptr == buf + std::strlen(buf) && back == x) return buf;
  }
  return buf;  // 17 digits round-trip every finite double; nan lands here
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header.size())
    fail_config("csv: row with " + std::to_string(cells.size()) + " cells added to a table with " +
                std::to_string(header.size()) + " columns");
  rows.push_back(std::move(cells));
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  fail_config("csv: no column named \"" + name + "\"");
}

double CsvTable::number(std::size_t row, int col) const {
  if (row >= rows.size())
    fail_config("csv: row " + std::to_string(row) + " out of range (" +
                std::to_string(rows.size()) + " rows)");
  const auto& cells = rows[row];
  if (col < 0 || static_cast<std::size_t>(col) >= cells.size())
    fail_config("csv: column " + std::to_string(col) + " out of range");
  const std::string& cell = cells[col];
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    fail_config("csv: cell \"" + cell + "\" is not a number");
  return out;
}

namespace {

void write_row(const std::vector<std::string>& cells, std::ostream& out) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string& cell = cells[i];
    if (cell.find_first_of(",\"\n\r") != std::string::npos)
      fail_config("csv: cell \"" + cell + "\" needs quoting, which this writer does not emit");
    if (i > 0) out << ',';
    out << cell;
  }
  out << '\n';
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

void write_csv(const CsvTable& table, std::ostream& out) {
  if (table.header.empty()) fail_config("csv: cannot write a table without a header");
  write_row(table.header, out);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      fail_config("csv: row width " + std::to_string(row.size()) + " does not match the header (" +
                  std::to_string(table.header.size()) + ")");
    write_row(row, out);
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size())
        fail_config("csv: line " + std::to_string(line_no) + " has " +
                    std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(table.header.size()));
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) fail_config("csv: empty input");
  return table;
}

void save_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_config("csv: cannot open \"" + path + "\" for writing");
  write_csv(table, out);
  out.flush();
  if (!out) fail_config("csv: write to \"" + path + "\" failed");
}

CsvTable load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_config("csv: cannot open \"" + path + "\"");
  return read_csv(in);
}

}  // namespace pcond
