#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace liq {

/// Shortest round-trip decimal form, independent of locale.
std::string format_number(double x);

/// Header plus rows of already formatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  void write(std::ostream& os) const;
  void write_file(const std::string& path) const;
};

}  // namespace liq
