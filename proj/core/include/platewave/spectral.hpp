#pragma once

#include "platewave/assembly.hpp"
#include "platewave/numerics.hpp"
#include "platewave/semigroup.hpp"

#include <optional>
#include <string>
#include <vector>

namespace platewave {

struct SpectrumReport {
  std::vector<EigenPair> pairs;  // vectors are (U, V) free coefficients
  double spectral_abscissa = 0.0;
  double mu_max = 0.0;
  // min |Re lambda| over eigenvalues with |Im lambda| <= mu_max
  double min_abs_re_in_band = 0.0;
  // max Re lambda over the same band
  double max_re_in_band = 0.0;
  std::size_t count_in_band = 0;
  double max_residual = 0.0;
  double tolerance = 1e-8;
  bool unstable = false;  // some Re lambda > tolerance
};

/// Default band limit pi / (4 h_max).
double default_mu_max(const Mesh& mesh);

/// Full spectrum of E^{-1} A. The dense eigenproblem is solved in
/// energy-orthonormal coordinates and each eigenvalue is refined with the
/// quadratic Rayleigh quotient of its displacement block.
SpectrumReport compute_spectrum(const GeneratorPencil& pencil, double mu_max);

class QuasiEigenvalueError : public std::runtime_error {
 public:
  QuasiEigenvalueError(double mu, double rcond);
  double mu() const { return mu_; }
  double rcond() const { return rcond_; }

 private:
  double mu_;
  double rcond_;
};

enum class NormMethod { Auto, Dense, Power };

struct ResolventNormOptions : OperatorNormOptions {
  NormMethod method = NormMethod::Auto;
  // Auto uses the dense singular value decomposition up to this state size
  Index dense_limit = 1000;
};

struct ResolventNormResult {
  double mu = 0.0;
  double norm = 0.0;
  int iterations = 0;  // 0 for the dense method
  double relative_residual = 0.0;
  NormMethod method = NormMethod::Dense;
};

/// Energy-norm operator norm of (A - i mu)^{-1}. The dense method takes the
/// largest singular value of L^T (A - i mu)^{-1} L^{-T} with Q = L L^T; power
/// iteration on R* R is used for large systems. Damping makes the real
/// eigenvalues accumulate, and near that cluster the leading singular values
/// are nearly degenerate, which slows power iteration considerably.
ResolventNormResult resolvent_norm(const GeneratorPencil& pencil, double mu,
                                   const ResolventNormOptions& options = {});

struct SweepPoint {
  double mu = 0.0;
  bool ok = false;
  double norm = 0.0;
  double log_norm = 0.0;
  std::string error;
};

struct ResolventSweep {
  std::vector<SweepPoint> points;
  // least-squares fit log ||R|| ~ c0 + c1 |mu| over successful points
  double c0 = 0.0;
  double c1 = 0.0;
  double fit_rms = 0.0;
  bool degenerate_fit = false;
  // max_j log ||R(i mu_j)|| / mu_j
  double empirical_c = 0.0;
  // running max of log ||R|| / mu at each grid point
  std::vector<double> running_max;
  std::size_t failures = 0;
};

/// Grid must be strictly increasing and positive. Points are evaluated in
/// parallel on `threads` workers (0 = hardware concurrency).
ResolventSweep resolvent_sweep(const GeneratorPencil& pencil, const std::vector<double>& mu_grid,
                               const ResolventNormOptions& options = {}, unsigned threads = 0);

/// Relative growth of the running maximum over the last half of the grid.
double running_max_growth(const ResolventSweep& sweep);

class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DecayFitReport {
  int k = 0;
  double sup = 0.0;
  double argmax_time = 0.0;
  // sup restricted to t <= T/10
  double sup_before_final_decade = 0.0;
  double final_decade_growth = 0.0;
  bool bounded = false;
  double horizon = 0.0;
};

/// sup_t E(t) (ln(2+t))^{2k} / x0_graph_norm^2. The verdict is bounded when
/// the running sup grows by less than 5% over the final decade [T/10, T].
DecayFitReport decay_fit(const std::vector<double>& times, const std::vector<double>& energy,
                         double x0_graph_norm, int k, double min_horizon = 100.0);
DecayFitReport decay_fit(const Trajectory& traj, double x0_graph_norm, int k);

}  // namespace platewave
