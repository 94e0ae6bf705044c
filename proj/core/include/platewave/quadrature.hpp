#pragma once

#include <span>
#include <vector>

namespace platewave {

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points, exact for polynomials of degree 2n-1.
const QuadratureRule& gauss_legendre(int n);

/// Sorted union of breakpoints restricted to [lo, hi], deduplicated to a
/// relative tolerance. lo and hi are always included.
std::vector<double> merge_breakpoints(double lo, double hi,
                                      std::span<const double> extra);

}  // namespace platewave
