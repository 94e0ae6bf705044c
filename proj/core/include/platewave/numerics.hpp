#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace platewave {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(Index pivot, double pivot_magnitude, double rcond);
  Index pivot_index() const { return pivot_; }
  double pivot_magnitude() const { return magnitude_; }
  double rcond() const { return rcond_; }

 private:
  Index pivot_;
  double magnitude_;
  double rcond_;
};

/// LU factorization with partial pivoting. Construction throws
/// SingularMatrixError when a pivot falls below n * eps * max|A|.
template <class Scalar>
class LuFactorization {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit LuFactorization(const Matrix& a);

  Matrix solve(const Matrix& b) const { return lu_.solve(b); }
  Vector solve(const Vector& b) const { return lu_.solve(b); }
  // Solves A^H x = b.
  Vector solve_adjoint(const Vector& b) const { return lu_.adjoint().solve(b); }

  Index size() const { return lu_.rows(); }
  double rcond() const { return rcond_; }
  Matrix reconstruct() const { return lu_.reconstructedMatrix(); }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
  double rcond_ = 0.0;
};

extern template class LuFactorization<double>;
extern template class LuFactorization<Complex>;

RealMatrix lu_solve(const RealMatrix& a, const RealMatrix& b);
ComplexMatrix lu_solve(const ComplexMatrix& a, const ComplexMatrix& b);

struct EigenPair {
  Complex value;
  ComplexVector vector;  // unit 2-norm
  double residual = 0.0;  // ||A v - value E v|| / (||A||_F ||v||)
};

class EigenSolveError : public std::runtime_error {
 public:
  EigenSolveError(const std::string& what, std::vector<Index> unconverged);
  const std::vector<Index>& unconverged() const { return unconverged_; }

 private:
  std::vector<Index> unconverged_;
};

struct EigenOptions {
  double residual_tolerance = 1e-8;
  // Throw EigenSolveError listing pairs whose residual exceeds the
  // tolerance. When false the residuals are only reported.
  bool enforce_residuals = true;
};

/// All eigenpairs of the pencil (A, E), i.e. of E^{-1} A. When E is
/// symmetric positive definite the problem is reduced with the Cholesky
/// factor of E; otherwise E^{-1} A is formed with an LU solve.
std::vector<EigenPair> generalized_eigs(const RealMatrix& a, const RealMatrix& e,
                                        const EigenOptions& options = {});

double pair_residual(const RealMatrix& a, const RealMatrix& e,
                     const EigenPair& pair);

/// Block-diagonal symmetric positive definite Gram matrix Q defining the
/// inner product <x, y>_Q = y^H Q x.
class BlockGram {
 public:
  explicit BlockGram(std::vector<RealMatrix> blocks);

  Index dim() const { return dim_; }
  ComplexVector apply(const ComplexVector& x) const;
  ComplexVector solve(const ComplexVector& x) const;
  Complex inner(const ComplexVector& x, const ComplexVector& y) const;
  double norm(const ComplexVector& x) const;
  double norm(const RealVector& x) const;

 private:
  std::vector<RealMatrix> blocks_;
  std::vector<Eigen::LLT<RealMatrix>> factors_;
  std::vector<Index> offsets_;
  Index dim_ = 0;
};

/// Linear map on C^n given by its action and the action of its Euclidean
/// adjoint (conjugate transpose).
struct LinearMap {
  Index dim = 0;
  std::function<ComplexVector(const ComplexVector&)> apply;
  std::function<ComplexVector(const ComplexVector&)> apply_adjoint;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(int iterations, double last_gap);
  int iterations() const { return iterations_; }
  double last_gap() const { return gap_; }

 private:
  int iterations_;
  double gap_;
};

struct OperatorNormOptions {
  double relative_tolerance = 1e-6;
  int max_iterations = 5000;
  std::uint64_t seed = 20240611;
  // Start from a real vector. For maps commuting with complex conjugation up
  // to conjugating the shift, this makes T(z) and T(conj z) iterate in step.
  bool real_start = false;
};

struct OperatorNormResult {
  double value = 0.0;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Largest singular value of `map` measured in the Q-inner product, by power
/// iteration on the Q-adjoint composition T* T with T* = Q^{-1} T^H Q.
OperatorNormResult operator_norm(const LinearMap& map, const BlockGram& gram,
                                 const OperatorNormOptions& options = {});

/// Seeded complex Gaussian vector.
ComplexVector random_complex_vector(Index n, std::uint64_t seed);
RealVector random_real_vector(Index n, std::uint64_t seed);

}  // namespace platewave
