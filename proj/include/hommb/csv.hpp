#ifndef HOMMB_CSV_HPP
#define HOMMB_CSV_HPP

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "hommb/errors.hpp"

namespace hommb {

/// Column-checked CSV emitter. Cells are preformatted strings; num() gives
/// the round-trippable rendering used for all numeric report columns.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> columns)
      : m_columns(std::move(columns)) {}

  static std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }

  static std::string num(long v) { return std::to_string(v); }
  static std::string num(int v) { return std::to_string(v); }

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != m_columns.size())
      throw ValidationError("csv row has " + std::to_string(cells.size()) +
                            " cells, table has " + std::to_string(m_columns.size()) +
                            " columns");
    m_rows.push_back(std::move(cells));
  }

  size_t rows() const { return m_rows.size(); }

  void write(std::ostream& out) const {
    write_line(out, m_columns);
    for (const auto& r : m_rows) write_line(out, r);
  }

private:
  static void write_line(std::ostream& out, const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  }

  std::vector<std::string> m_columns;
  std::vector<std::vector<std::string>> m_rows;
};

} // namespace hommb

#endif
