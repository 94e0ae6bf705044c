#include "platewave/resolvent.hpp"

namespace platewave {
namespace {

ComplexMatrix shifted_operator(const GeneratorPencil& p, Complex z) {
  return (z * z) * p.mass.cast<Complex>() + z * p.damping_matrix.cast<Complex>() +
         p.stiffness.cast<Complex>();
}

}  // namespace

ShiftedSolver::ShiftedSolver(const GeneratorPencil& pencil, Complex z)
    : z_(z),
      n_(pencil.n_free()),
      mass_(pencil.mass.cast<Complex>()),
      shifted_damping_(z * pencil.mass.cast<Complex>() +
                       pencil.damping_matrix.cast<Complex>()),
      lu_(shifted_operator(pencil, z)) {}

ComplexVector ShiftedSolver::solve(const ComplexVector& f) const {
  if (f.size() != 2 * n_) {
    throw std::invalid_argument("ShiftedSolver::solve: state size mismatch");
  }
  const ComplexVector fu = f.head(n_);
  const ComplexVector fv = f.tail(n_);
  ComplexVector x(2 * n_);
  const ComplexVector u = lu_.solve(ComplexVector(mass_ * fv + shifted_damping_ * fu));
  x.head(n_) = u;
  x.tail(n_) = z_ * u - fu;
  return x;
}

ComplexMatrix ShiftedSolver::solve(const ComplexMatrix& f) const {
  if (f.rows() != 2 * n_) {
    throw std::invalid_argument("ShiftedSolver::solve: state size mismatch");
  }
  const auto fu = f.topRows(n_);
  const auto fv = f.bottomRows(n_);
  ComplexMatrix x(2 * n_, f.cols());
  const ComplexMatrix u = lu_.solve(ComplexMatrix(mass_ * fv + shifted_damping_ * fu));
  x.topRows(n_) = u;
  x.bottomRows(n_) = z_ * u - fu;
  return x;
}

ComplexVector ShiftedSolver::solve_adjoint(const ComplexVector& g) const {
  if (g.size() != 2 * n_) {
    throw std::invalid_argument("ShiftedSolver::solve_adjoint: state size mismatch");
  }
  const ComplexVector a = g.head(n_);
  const ComplexVector b = g.tail(n_);
  // P is complex symmetric, so P^{-H} y = conj(P^{-1} conj(y)).
  const ComplexVector rhs = a + std::conj(z_) * b;
  const ComplexVector w = lu_.solve(ComplexVector(rhs.conjugate())).conjugate();
  ComplexVector out(2 * n_);
  out.head(n_) = shifted_damping_.adjoint() * w - b;
  out.tail(n_) = mass_ * w;
  return out;
}

LinearMap ShiftedSolver::as_map() const {
  LinearMap map;
  map.dim = 2 * n_;
  map.apply = [this](const ComplexVector& x) { return solve(x); };
  map.apply_adjoint = [this](const ComplexVector& x) { return solve_adjoint(x); };
  return map;
}

RealVector resolvent_smoothing(const GeneratorPencil& pencil, const RealVector& f, int k) {
  if (k < 0) {
    throw std::invalid_argument("resolvent_smoothing: order must be nonnegative");
  }
  RealVector x = f;
  if (k == 0) {
    return x;
  }
  const ShiftedSolver solver(pencil, Complex(1.0, 0.0));
  for (int j = 0; j < k; ++j) {
    x = solver.solve(ComplexVector(x.cast<Complex>())).real();
  }
  return x;
}

}  // namespace platewave
