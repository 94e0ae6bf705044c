#include "platewave/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace platewave::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_triplet(std::ostream& os, const RealMatrix& a) {
  std::size_t nnz = 0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      nnz += a(i, j) != 0.0;
    }
  }
  os << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) {
        os << i << ' ' << j << ' ' << format_double(a(i, j)) << '\n';
      }
    }
  }
}

void write_triplet(std::ostream& os, const RealVector& v) {
  write_triplet(os, RealMatrix(v));
}

RealMatrix read_triplet(std::istream& is) {
  long long rows = 0, cols = 0, nnz = 0;
  if (!(is >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
    throw std::runtime_error("read_triplet: malformed header");
  }
  RealMatrix a = RealMatrix::Zero(rows, cols);
  for (long long k = 0; k < nnz; ++k) {
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(is >> i >> j >> v)) {
      throw std::runtime_error("read_triplet: truncated entry list");
    }
    if (i < 0 || i >= rows || j < 0 || j >= cols) {
      std::ostringstream msg;
      msg << "read_triplet: entry (" << i << ", " << j << ") out of range";
      throw std::runtime_error(msg.str());
    }
    a(i, j) = v;
  }
  return a;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header)
    : os_(os), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    os_ << (i ? "," : "") << header[i];
  }
  os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) {
    throw std::invalid_argument("CsvWriter: row width does not match header");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    os_ << (i ? "," : "") << format_double(values[i]);
  }
  os_ << '\n';
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace platewave::io
