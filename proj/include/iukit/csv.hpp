#pragma once

// CSV emission in one fixed dialect: comma separator, `.` decimal point, 17
// significant digits for doubles, LF line endings, mandatory header row.
// Cells are appended in row-major order and each row is checked against the
// header width, so a malformed table is a programming error caught at the
// emission site instead of a silently ragged file.

#include <string>
#include <vector>

namespace iukit {

// %.17g rendering used for every floating-point artifact cell.
std::string format_double(double x);

class CsvTable {
 public:
  explicit CsvTable(const std::vector<std::string>& header);

  CsvTable& cell(double x);
  CsvTable& cell(int x);
  CsvTable& cell(const std::string& text);
  CsvTable& end_row();

  int rows() const { return rows_; }
  int columns() const { return columns_; }
  const std::string& text() const;

 private:
  int columns_ = 0;
  int rows_ = 0;
  int pending_ = 0;  // cells in the row under construction
  std::string text_;
};

// Writes bytes exactly as given; parent directory must exist.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace iukit
