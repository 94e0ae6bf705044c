#include "platewave/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace platewave {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string singular_message(Index pivot, double magnitude, double rcond) {
  std::ostringstream msg;
  msg << "lu: numerically singular pivot at index " << pivot
      << " (|u_ii| = " << magnitude << ", rcond ~ " << rcond << ")";
  return msg.str();
}

bool is_identity(const RealMatrix& e) {
  if (e.rows() != e.cols()) {
    return false;
  }
  return (e - RealMatrix::Identity(e.rows(), e.cols())).cwiseAbs().maxCoeff() == 0.0;
}

bool is_symmetric(const RealMatrix& e) {
  const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
  return (e - e.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale;
}

}  // namespace

SingularMatrixError::SingularMatrixError(Index pivot, double pivot_magnitude,
                                         double rcond)
    : std::runtime_error(singular_message(pivot, pivot_magnitude, rcond)),
      pivot_(pivot),
      magnitude_(pivot_magnitude),
      rcond_(rcond) {}

template <class Scalar>
LuFactorization<Scalar>::LuFactorization(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("lu: matrix must be square");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("lu: matrix has non-finite entries");
  }
  lu_.compute(a);
  const Index n = a.rows();
  const double scale = a.cwiseAbs().maxCoeff();
  const double threshold = std::max<double>(1, static_cast<double>(n)) * kEps * scale;
  const auto& packed = lu_.matrixLU();
  double worst = std::numeric_limits<double>::infinity();
  Index worst_index = 0;
  for (Index i = 0; i < n; ++i) {
    const double m = std::abs(packed(i, i));
    if (m < worst) {
      worst = m;
      worst_index = i;
    }
  }
  rcond_ = n == 0 ? 1.0 : lu_.rcond();
  if (n > 0 && (scale == 0.0 || worst <= threshold)) {
    throw SingularMatrixError(worst_index, worst, rcond_);
  }
}

template class LuFactorization<double>;
template class LuFactorization<Complex>;

RealMatrix lu_solve(const RealMatrix& a, const RealMatrix& b) {
  if (b.rows() != a.rows()) {
    throw std::invalid_argument("lu_solve: right-hand side has wrong row count");
  }
  return LuFactorization<double>(a).solve(b);
}

ComplexMatrix lu_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (b.rows() != a.rows()) {
    throw std::invalid_argument("lu_solve: right-hand side has wrong row count");
  }
  return LuFactorization<Complex>(a).solve(b);
}

EigenSolveError::EigenSolveError(const std::string& what,
                                 std::vector<Index> unconverged)
    : std::runtime_error(what), unconverged_(std::move(unconverged)) {}

double pair_residual(const RealMatrix& a, const RealMatrix& e,
                     const EigenPair& pair) {
  const ComplexVector av = a * pair.vector;
  const ComplexVector ev = e * pair.vector;
  const double denom = a.norm() * pair.vector.norm();
  if (denom == 0.0) {
    return (av - pair.value * ev).norm();
  }
  return (av - pair.value * ev).norm() / denom;
}

std::vector<EigenPair> generalized_eigs(const RealMatrix& a, const RealMatrix& e,
                                        const EigenOptions& options) {
  if (a.rows() != a.cols() || e.rows() != a.rows() || e.cols() != a.cols()) {
    throw std::invalid_argument("generalized_eigs: shape mismatch");
  }
  const Index n = a.rows();
  RealMatrix reduced;
  std::optional<Eigen::LLT<RealMatrix>> chol;
  if (is_identity(e)) {
    reduced = a;
  } else if (is_symmetric(e) && (chol.emplace(e), chol->info() == Eigen::Success)) {
    // C = L^{-1} A L^{-T}; eigenvectors map back through v = L^{-T} w.
    RealMatrix tmp = chol->matrixL().solve(a);
    reduced = chol->matrixL().solve(tmp.transpose()).transpose();
  } else {
    chol.reset();
    reduced = LuFactorization<double>(e).solve(a);
  }

  Eigen::EigenSolver<RealMatrix> solver(reduced, true);
  if (solver.info() != Eigen::Success) {
    std::vector<Index> all(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      all[static_cast<std::size_t>(i)] = i;
    }
    throw EigenSolveError("generalized_eigs: QR iteration did not converge",
                          std::move(all));
  }
  const ComplexVector values = solver.eigenvalues();
  ComplexMatrix vectors = solver.eigenvectors();
  if (chol) {
    const ComplexMatrix lt = chol->matrixU().toDenseMatrix().cast<Complex>();
    vectors = lt.triangularView<Eigen::Upper>().solve(vectors);
  }

  std::vector<EigenPair> pairs(static_cast<std::size_t>(n));
  std::vector<Index> bad;
  for (Index j = 0; j < n; ++j) {
    EigenPair& p = pairs[static_cast<std::size_t>(j)];
    p.value = values(j);
    p.vector = vectors.col(j);
    const double nrm = p.vector.norm();
    if (nrm > 0.0) {
      p.vector /= nrm;
    }
    p.residual = pair_residual(a, e, p);
    if (!(p.residual <= options.residual_tolerance)) {
      bad.push_back(j);
    }
  }
  if (options.enforce_residuals && !bad.empty()) {
    std::ostringstream msg;
    msg << "generalized_eigs: " << bad.size()
        << " eigenpairs exceed residual tolerance " << options.residual_tolerance;
    throw EigenSolveError(msg.str(), std::move(bad));
  }
  return pairs;
}

BlockGram::BlockGram(std::vector<RealMatrix> blocks) : blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) {
    if (b.rows() != b.cols()) {
      throw std::invalid_argument("BlockGram: blocks must be square");
    }
    offsets_.push_back(dim_);
    dim_ += b.rows();
    factors_.emplace_back(b);
    if (factors_.back().info() != Eigen::Success) {
      throw std::invalid_argument("BlockGram: block is not positive definite");
    }
  }
}

ComplexVector BlockGram::apply(const ComplexVector& x) const {
  ComplexVector y(dim_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Index n = blocks_[b].rows();
    y.segment(offsets_[b], n) = blocks_[b] * x.segment(offsets_[b], n);
  }
  return y;
}

ComplexVector BlockGram::solve(const ComplexVector& x) const {
  ComplexVector y(dim_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Index n = blocks_[b].rows();
    const ComplexVector seg = x.segment(offsets_[b], n);
    RealMatrix parts(n, 2);
    parts.col(0) = seg.real();
    parts.col(1) = seg.imag();
    const RealMatrix sol = factors_[b].solve(parts);
    y.segment(offsets_[b], n).real() = sol.col(0);
    y.segment(offsets_[b], n).imag() = sol.col(1);
  }
  return y;
}

Complex BlockGram::inner(const ComplexVector& x, const ComplexVector& y) const {
  return y.dot(apply(x));
}

double BlockGram::norm(const ComplexVector& x) const {
  double s = 0.0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Index n = blocks_[b].rows();
    const auto re = x.segment(offsets_[b], n).real();
    const auto im = x.segment(offsets_[b], n).imag();
    s += re.dot(blocks_[b] * re) + im.dot(blocks_[b] * im);
  }
  return std::sqrt(std::max(0.0, s));
}

double BlockGram::norm(const RealVector& x) const {
  double s = 0.0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Index n = blocks_[b].rows();
    const auto seg = x.segment(offsets_[b], n);
    s += seg.dot(blocks_[b] * seg);
  }
  return std::sqrt(std::max(0.0, s));
}

NonConvergenceError::NonConvergenceError(int iterations, double last_gap)
    : std::runtime_error("operator_norm: power iteration did not converge after " +
                         std::to_string(iterations) + " iterations (last gap " +
                         std::to_string(last_gap) + ")"),
      iterations_(iterations),
      gap_(last_gap) {}

ComplexVector random_complex_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return v;
}

RealVector random_real_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RealVector v(n);
  for (Index i = 0; i < n; ++i) {
    v(i) = normal(rng);
  }
  return v;
}

OperatorNormResult operator_norm(const LinearMap& map, const BlockGram& gram,
                                 const OperatorNormOptions& options) {
  if (map.dim != gram.dim()) {
    throw std::invalid_argument("operator_norm: map and Gram dimensions differ");
  }
  ComplexVector x = options.real_start
                        ? ComplexVector(random_real_vector(map.dim, options.seed).cast<Complex>())
                        : random_complex_vector(map.dim, options.seed);
  x /= gram.norm(x);
  double sigma2 = 0.0;
  double previous = 0.0;
  OperatorNormResult result;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const ComplexVector y = map.apply(x);
    sigma2 = std::pow(gram.norm(y), 2);
    // z = T* T x with T* = Q^{-1} T^H Q
    const ComplexVector z = gram.solve(map.apply_adjoint(gram.apply(y)));
    if (sigma2 == 0.0) {
      const double zn = gram.norm(z);
      if (zn == 0.0) {
        result.value = 0.0;
        result.iterations = it;
        return result;
      }
    }
    const double residual = gram.norm(ComplexVector(z - sigma2 * x));
    result.relative_residual = sigma2 > 0.0 ? residual / sigma2 : residual;
    result.iterations = it;
    if (sigma2 > 0.0 && result.relative_residual <= options.relative_tolerance) {
      result.value = std::sqrt(sigma2);
      return result;
    }
    const double zn = gram.norm(z);
    if (zn == 0.0) {
      result.value = std::sqrt(sigma2);
      return result;
    }
    x = z / zn;
    previous = sigma2;
  }
  throw NonConvergenceError(options.max_iterations,
                            std::abs(std::sqrt(sigma2) - std::sqrt(previous)));
}

}  // namespace platewave
