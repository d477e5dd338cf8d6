#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace pcond {

/// Shortest decimal string that parses back to exactly the same double
/// (tries 15, 16, then 17 significant digits).
std::string format_double(double x);

/// In-memory comma-separated table: one header row plus string cells.
/// The writer rejects cells containing commas, quotes, or newlines instead
/// of quoting them; everything the toolkit emits stays inside this plain
/// subset, which keeps the reader trivially exact.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Appends a row, checking its width against the header.
  void add_row(std::vector<std::string> cells);

  /// Column index of a header name; unknown names are a config error.
  int column(const std::string& name) const;

  /// Cell parsed as a double; out-of-range indices and non-numeric cells
  /// are config errors.
  double number(std::size_t row, int col) const;
};

void write_csv(const CsvTable& table, std::ostream& out);
CsvTable read_csv(std::istream& in);

void save_csv(const CsvTable& table, const std::string& path);
CsvTable load_csv(const std::string& path);

}  // namespace pcond
