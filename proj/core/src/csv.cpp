#include "goalrom/csv.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace goalrom {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += ',';
    out += cells[i];
  }
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), path_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path);
  out_ << join(header) << '\n';
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << '\n'; }

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw std::logic_error(path_ + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(columns_));
  }
  out_ << join(cells) << '\n';
}

std::string CsvWriter::cell(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string CsvWriter::cell(long v) { return std::to_string(v); }

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::runtime_error("csv: no column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const std::string& text = rows.at(row).at(column(name));
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::runtime_error("csv: '" + text + "' in column " + name + " is not a number");
  }
  return v;
}

CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      table.comments.push_back(line.size() > 2 ? line.substr(2) : std::string());
      continue;
    }
    std::vector<std::string> cells = split(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      if (!expected_header.empty() && table.header != expected_header) {
        throw std::runtime_error(path + ": header '" + join(table.header) + "' != expected '" +
                                 join(expected_header) + "'");
      }
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw std::runtime_error(path + ": row width " + std::to_string(cells.size()) + " != header width " +
                               std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw std::runtime_error(path + ": missing header row");
  return table;
}

}  // namespace goalrom
