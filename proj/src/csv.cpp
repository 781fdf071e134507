#include "iukit/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "iukit/errors.hpp"

namespace iukit {

namespace {

void check_cell_text(const std::string& text) {
  for (char c : text) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') {
      throw DomainError("csv: cell text may not contain separators or quotes: " + text);
    }
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable::CsvTable(const std::vector<std::string>& header) {
  if (header.empty()) throw DomainError("csv: header row is mandatory");
  columns_ = static_cast<int>(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    check_cell_text(header[i]);
    if (i > 0) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

CsvTable& CsvTable::cell(double x) { return cell(format_double(x)); }

CsvTable& CsvTable::cell(int x) { return cell(std::to_string(x)); }

CsvTable& CsvTable::cell(const std::string& text) {
  check_cell_text(text);
  if (pending_ >= columns_) {
    throw DomainError("csv: row has more cells than the header");
  }
  if (pending_ > 0) text_ += ',';
  text_ += text;
  ++pending_;
  return *this;
}

CsvTable& CsvTable::end_row() {
  if (pending_ != columns_) {
    throw DomainError("csv: row has " + std::to_string(pending_) + " cells, header has " +
                      std::to_string(columns_));
  }
  text_ += '\n';
  pending_ = 0;
  ++rows_;
  return *this;
}

const std::string& CsvTable::text() const {
  if (pending_ != 0) throw DomainError("csv: unfinished row");
  return text_;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace iukit
