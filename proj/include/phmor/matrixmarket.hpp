#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "phmor/errors.hpp"
#include "phmor/linalg.hpp"
#include "phmor/ph_system.hpp"

namespace phmor {

inline constexpr Index kDefaultDenseLimit = 4096;

namespace mm_detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Header {
  bool coordinate = true;       // vs array
  std::string field;            // real | integer
  std::string symmetry;         // general | symmetric | skew-symmetric
};

inline Header parse_header(const std::string& line, long lineno) {
  std::istringstream ss(line);
  std::string banner, object, format, field, symmetry;
  ss >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket")
    throw ParseError(lineno, "missing %%MatrixMarket banner");
  if (lower(object) != "matrix")
    throw ParseError(lineno, "unsupported object '" + object + "'");
  Header h;
  format = lower(format);
  if (format == "coordinate")
    h.coordinate = true;
  else if (format == "array")
    h.coordinate = false;
  else
    throw ParseError(lineno, "unsupported format '" + format + "'");
  h.field = lower(field);
  if (h.field != "real" && h.field != "integer")
    throw ParseError(lineno, "unsupported field '" + field + "'");
  h.symmetry = lower(symmetry);
  if (h.symmetry != "general" && h.symmetry != "symmetric" &&
      h.symmetry != "skew-symmetric")
    throw ParseError(lineno, "unsupported symmetry '" + symmetry + "'");
  return h;
}

}  // namespace mm_detail

/// Reads a real MatrixMarket file (coordinate or array; general, symmetric or
/// skew-symmetric) into a dense matrix. Dimensions above dense_limit are
/// rejected.
inline Matrix read_matrix_market(const std::string& path,
                                 Index dense_limit = kDefaultDenseLimit) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file: " + path);

  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) throw ParseError(1, "empty file");
  ++lineno;
  const auto header = mm_detail::parse_header(line, lineno);

  // Skip comments and blank lines up to the size line.
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] != '%') break;
  }
  if (line.empty() || line[0] == '%') throw ParseError(lineno, "missing size line");

  std::istringstream size_ss(line);
  long rows = 0, cols = 0, nnz = 0;
  if (header.coordinate) {
    if (!(size_ss >> rows >> cols >> nnz))
      throw ParseError(lineno, "malformed coordinate size line");
  } else {
    if (!(size_ss >> rows >> cols))
      throw ParseError(lineno, "malformed array size line");
  }
  if (rows < 1 || cols < 1) throw ParseError(lineno, "nonpositive dimensions");
  if (rows > dense_limit || cols > dense_limit)
    throw DenseLimitExceeded("matrix " + path + " exceeds dense limit " +
                             std::to_string(dense_limit));

  Matrix M = Matrix::Zero(rows, cols);
  if (header.coordinate) {
    long seen = 0;
    while (seen < nnz) {
      if (!std::getline(in, line))
        throw ParseError(lineno + 1, "unexpected end of file");
      ++lineno;
      if (line.empty() || line[0] == '%') continue;
      std::istringstream es(line);
      long i = 0, j = 0;
      double v = 0.0;
      if (!(es >> i >> j >> v)) throw ParseError(lineno, "malformed entry");
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw ParseError(lineno, "index out of range");
      M(i - 1, j - 1) = v;
      if (header.symmetry == "symmetric" && i != j) M(j - 1, i - 1) = v;
      if (header.symmetry == "skew-symmetric" && i != j) M(j - 1, i - 1) = -v;
      ++seen;
    }
  } else {
    // Array format: column-major dense values; symmetric/skew store the lower
    // triangle only.
    for (long j = 0; j < cols; ++j) {
      const long i_begin = header.symmetry == "general" ? 0
                           : header.symmetry == "symmetric" ? j
                                                            : j + 1;
      for (long i = i_begin; i < rows; ++i) {
        double v = 0.0;
        long guard = 0;
        do {
          if (!std::getline(in, line))
            throw ParseError(lineno + 1, "unexpected end of file");
          ++lineno;
          if (++guard > 1000000) throw ParseError(lineno, "runaway comment block");
        } while (line.empty() || line[0] == '%');
        std::istringstream es(line);
        if (!(es >> v)) throw ParseError(lineno, "malformed value");
        M(i, j) = v;
        if (header.symmetry == "symmetric" && i != j) M(j, i) = v;
        if (header.symmetry == "skew-symmetric" && i != j) M(j, i) = -v;
      }
    }
  }
  return M;
}

/// Writes a dense matrix in coordinate format (general symmetry), dropping
/// exact zeros. Values round-trip bit-exactly through %.17g.
inline void write_matrix_market(const std::string& path, const Matrix& M) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix file: " + path);
  long nnz = 0;
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = 0; i < M.rows(); ++i)
      if (M(i, j) != 0.0) ++nnz;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << M.rows() << " " << M.cols() << " " << nnz << "\n";
  char buf[64];
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = 0; i < M.rows(); ++i)
      if (M(i, j) != 0.0) {
        std::snprintf(buf, sizeof(buf), "%.17g", M(i, j));
        out << (i + 1) << " " << (j + 1) << " " << buf << "\n";
      }
}

/// Writes a vector in array format.
inline void write_matrix_market_vector(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix file: " + path);
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  char buf[64];
  for (Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    out << buf << "\n";
  }
}

}  // namespace phmor
