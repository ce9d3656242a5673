#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace goalrom {

/// Comma-separated writer. Doubles are written at 17 significant digits;
/// lines starting with '#' are comments and ignored by read_csv.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void comment(const std::string& text);
  /// Cells already formatted; count must match the header.
  void row(const std::vector<std::string>& cells);

  static std::string cell(double v);
  static std::string cell(long v);
  static std::string cell(int v) { return cell(static_cast<long>(v)); }
  static std::string cell(const std::string& v) { return v; }

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::runtime_error if absent.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

/// Reads a CSV and checks its header equals `expected_header` (when
/// non-empty) and every row has the header's width. Throws
/// std::runtime_error on any schema violation.
CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected_header = {});

}  // namespace goalrom
