#pragma once

#include <istream>
#include <string>
#include <vector>

#include "rao/matrix_ops.hpp"

namespace rao::io {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  Matrix data;                      // rows = observations
};

// Comma-delimited numeric table. A first row containing any non-numeric
// field is taken as the header. Blank lines are skipped. Rows with a
// missing or non-numeric field raise DataError naming the line.
CsvTable parse_csv(std::istream& in, const std::string& source);
CsvTable read_csv(const std::string& path);

// Reads a p x p correlation matrix and validates symmetry, unit diagonal
// and positive definiteness. When expected_p > 0 the dimension must match;
// the error names both dimensions.
SymMatrix read_correlation_csv(const std::string& path, int expected_p = 0);

}  // namespace rao::io
