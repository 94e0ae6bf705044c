#pragma once

#include "platewave/assembly.hpp"
#include "platewave/numerics.hpp"

namespace platewave {

/// Solves (z - A) x = f for the generator A = E^{-1} A_pencil through the
/// reduced complex-symmetric system P(z) U = M f_V + (z M + D) f_U with
/// P(z) = z^2 M + z D + K, then V = z U - f_U.
/// Construction throws SingularMatrixError when P(z) is numerically singular.
class ShiftedSolver {
 public:
  ShiftedSolver(const GeneratorPencil& pencil, Complex z);

  Complex shift() const { return z_; }
  Index state_size() const { return 2 * n_; }
  double rcond() const { return lu_.rcond(); }

  ComplexVector solve(const ComplexVector& f) const;
  // Column-wise solve for a 2n x m block of right-hand sides.
  ComplexMatrix solve(const ComplexMatrix& f) const;
  // Euclidean (conjugate-transpose) adjoint of solve.
  ComplexVector solve_adjoint(const ComplexVector& g) const;

  LinearMap as_map() const;

 private:
  Complex z_;
  Index n_;
  ComplexMatrix mass_;
  ComplexMatrix shifted_damping_;  // z M + D
  LuFactorization<Complex> lu_;
};

/// x = (I - A)^{-k} f for real data.
RealVector resolvent_smoothing(const GeneratorPencil& pencil, const RealVector& f, int k);

}  // namespace platewave
