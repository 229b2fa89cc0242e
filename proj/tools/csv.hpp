#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wetfb_cli {

// %.17g: shortest text that round-trips an IEEE double exactly.
inline std::string fmt_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string fmt_int(long long x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld", x);
  return buf;
}

// RFC-4180 quoting: wrap in quotes when the cell holds a comma, quote, or
// newline; embedded quotes double.
inline std::string csv_quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
      throw std::runtime_error("csv row width does not match header");
    rows_.push_back(std::move(cells));
  }

  // Writes to a temporary sibling first and renames into place, so readers
  // never observe a half-written file.
  void write(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw std::runtime_error("cannot open output file: " + tmp);
      write_line(os, header_);
      for (const auto& row : rows_) write_line(os, row);
      os.flush();
      if (!os) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
      throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }

  size_t row_count() const { return rows_.size(); }

 private:
  static void write_line(std::ofstream& os, const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << csv_quote(cells[i]);
    }
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace wetfb_cli
