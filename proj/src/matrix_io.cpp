#include "pfcone/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pfcone {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Matrix read_matrix(std::istream& in) {
  std::string keyword;
  long long n = 0;
  if (!(in >> keyword >> n) || keyword != "dim" || n < 1) {
    throw Error(ErrorKind::ParseError, "matrix must start with 'dim n', n >= 1");
  }
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      std::string token;
      if (!(in >> token)) {
        throw Error(ErrorKind::ParseError, "matrix truncated at row " + std::to_string(i));
      }
      std::size_t used = 0;
      try {
        m(i, j) = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) throw Error(ErrorKind::ParseError, "bad entry '" + token + "'");
    }
  }
  std::string extra;
  if (in >> extra) throw Error(ErrorKind::ParseError, "trailing data after matrix: '" + extra + "'");
  return m;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open matrix file " + path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << "dim " << m.rows() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace pfcone
