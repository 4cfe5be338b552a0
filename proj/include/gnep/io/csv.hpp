#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnep::io {

/// Round-trip-exact, locale-independent formatting so identical runs produce
/// identical bytes.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Minimal fixed-schema CSV writer.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  class Row {
   public:
    explicit Row(std::size_t expect) { cells_.reserve(expect); }
    Row& add(double v) {
      cells_.push_back(format_double(v));
      return *this;
    }
    Row& add(int v) {
      cells_.push_back(std::to_string(v));
      return *this;
    }
    Row& add(std::string v) {
      cells_.push_back(std::move(v));
      return *this;
    }
    const std::vector<std::string>& cells() const { return cells_; }

   private:
    std::vector<std::string> cells_;
  };

  Row row() const { return Row(columns_.size()); }

  void append(Row r) {
    if (r.cells().size() != columns_.size()) {
      throw std::invalid_argument("CsvWriter: row has " + std::to_string(r.cells().size()) +
                                  " cells, expected " + std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(r));
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      out << (i ? "," : "") << columns_[i];
    }
    out << "\n";
    for (const Row& r : rows_) {
      for (std::size_t i = 0; i < r.cells().size(); ++i) {
        out << (i ? "," : "") << r.cells()[i];
      }
      out << "\n";
    }
  }

 private:
  std::vector<std::string> columns_;
  std::vector<Row> rows_;
};

}  // namespace gnep::io
