#pragma once

// Plain CSV (comma separated, '.' decimal, mandatory header) and the number
// formatting shared by every CLI output.

#include <iosfwd>
#include <string>
#include <vector>

#include "ics/matlin.hpp"

namespace ics::cli {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws ParseError when absent.
  std::size_t column(const std::string& name) const;
};

/// Throws ParseError for a missing header, ragged rows or unterminated quotes.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv_file(const std::string& path);

/// Every cell must parse as a finite number; errors name the data row (1-based)
/// and the column.
Matrix numeric_matrix(const CsvTable& table);

/// Shortest text that reads back to the same double.
std::string format_number(double v);

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

std::string read_text_file(const std::string& path);
/// Writes to a file, or to `fallback` when path is empty or "-".
void write_text(const std::string& path, const std::string& text, std::ostream& fallback);

}  // namespace ics::cli
