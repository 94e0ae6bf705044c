#pragma once

#include <array>

namespace platewave::fem {

// Hermite cubic shape functions on an element of length h, local DOFs
// (value_a, slope_a, value_b, slope_b), evaluated at t in [0, 1]. Derivatives
// are with respect to the physical coordinate.
inline std::array<double, 4> hermite(double t, double h) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {1.0 - 3.0 * t2 + 2.0 * t3, h * (t - 2.0 * t2 + t3), 3.0 * t2 - 2.0 * t3,
          h * (t3 - t2)};
}

inline std::array<double, 4> hermite_d1(double t, double h) {
  return {6.0 * (t * t - t) / h, 1.0 - 4.0 * t + 3.0 * t * t,
          6.0 * (t - t * t) / h, 3.0 * t * t - 2.0 * t};
}

inline std::array<double, 4> hermite_d2(double t, double h) {
  return {(12.0 * t - 6.0) / (h * h), (6.0 * t - 4.0) / h,
          (6.0 - 12.0 * t) / (h * h), (6.0 * t - 2.0) / h};
}

inline std::array<double, 4> hermite_d3(double /*t*/, double h) {
  return {12.0 / (h * h * h), 6.0 / (h * h), -12.0 / (h * h * h), 6.0 / (h * h)};
}

inline std::array<double, 2> hat(double t) { return {1.0 - t, t}; }
inline std::array<double, 2> hat_d1(double h) { return {-1.0 / h, 1.0 / h}; }

}  // namespace platewave::fem
