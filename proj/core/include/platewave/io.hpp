#pragma once

#include "platewave/numerics.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace platewave::io {

/// 17 significant digits (%.17g): values round-trip exactly.
std::string format_double(double v);

/// Sparse triplet text format: "rows cols nnz" then one "i j value" line per
/// nonzero, 0-based, row-major order.
void write_triplet(std::ostream& os, const RealMatrix& a);
RealMatrix read_triplet(std::istream& is);

/// Column vector as an n x 1 triplet matrix.
void write_triplet(std::ostream& os, const RealVector& v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);

 private:
  std::ostream& os_;
  std::size_t columns_;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace platewave::io
