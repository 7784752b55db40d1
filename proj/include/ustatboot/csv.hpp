#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ustatboot/matrix.hpp"

namespace ustatboot {

struct CsvTable {
  Matrix values;
  bool had_header = false;
  std::vector<std::string> header;
};

/// Parse comma-separated numeric data. A first row with any cell that does
/// not parse as a number is treated as a header. Decimal separator is always
/// '.', independent of locale. Errors cite the offending row/column.
CsvTable parse_csv(std::istream& in, const std::string& source_name);
CsvTable read_csv(const std::string& path);

/// Comma-separated output with 17-significant-digit numbers.
void write_csv(std::ostream& out, const Matrix& values,
               const std::vector<std::string>& header = {});
void write_csv_file(const std::string& path, const Matrix& values,
                    const std::vector<std::string>& header = {});

}  // namespace ustatboot
