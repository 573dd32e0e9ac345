#pragma once

// Token helpers shared by the line-oriented state and circuit formats.

#include "mpslearn/errors.hpp"
#include "mpslearn/linalg.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

namespace mpslearn::detail {

inline std::string fmt_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_complex(std::ostream& out, Complex z) {
  out << fmt_real(z.real()) << ' ' << fmt_real(z.imag()) << '\n';
}

inline void expect_token(std::istream& in, const std::string& want) {
  std::string got;
  if (!(in >> got) || got != want) {
    throw Error(ErrorCode::ParseError, "expected '" + want + "', found '" + got + "'");
  }
}

template <typename T>
T read_value(std::istream& in, const char* what) {
  T value{};
  if (!(in >> value)) throw Error(ErrorCode::ParseError, std::string("could not read ") + what);
  return value;
}

inline Complex read_complex(std::istream& in) {
  const double re = read_value<double>(in, "real part");
  const double im = read_value<double>(in, "imaginary part");
  return {re, im};
}

inline void write_matrix(std::ostream& out, const ComplexMatrix& m) {
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) write_complex(out, m(r, c));
}

inline ComplexMatrix read_matrix(std::istream& in, Index rows, Index cols) {
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = read_complex(in);
  return m;
}

}  // namespace mpslearn::detail
