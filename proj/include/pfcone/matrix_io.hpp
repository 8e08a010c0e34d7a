#pragma once

#include <iosfwd>
#include <string>

#include "pfcone/operator.hpp"

namespace pfcone {

// Plain-text matrix format:
//   dim n
//   n rows of n whitespace-separated decimals
// Writers use 17 significant digits so doubles round-trip exactly.

Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Matrix& m);

/// "%.17g" formatting shared by every writer in the toolkit.
std::string format_double(double x);

}  // namespace pfcone
