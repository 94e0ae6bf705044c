#pragma once

#include "platewave/geometry.hpp"

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace platewave {

// Phase-space computations live on the slab (x', x_n) in R^2, with x_n the
// coordinate of the 1D geometry. Weights built for the 1D problem depend on
// x_n only; the tangential direction x' carries the characteristic
// covectors, which are empty in strictly one dimension.
using Point2 = Eigen::Vector2d;
using Hessian2 = Eigen::Matrix2d;

/// psi(x) = offset + linear . x + sum_j quad_j (x_j - center_j)^2
struct QuadraticPsi {
  double offset = 0.0;
  Point2 linear = Point2::Zero();
  Point2 quad = Point2::Zero();
  Point2 center = Point2::Zero();

  double value(const Point2& x) const;
  Point2 gradient(const Point2& x) const;
  Hessian2 hessian() const;
};

/// psi restricted to lo <= x_n <= hi.
struct PsiPiece {
  double lo = 0.0;
  double hi = 0.0;
  QuadraticPsi psi;
};

/// phi = exp(lambda psi) + shift for lambda > 0, phi = psi + shift for
/// lambda = 0. The piece is chosen by x_n; at a shared endpoint the first
/// listed piece wins.
class WeightFunction {
 public:
  WeightFunction() = default;
  WeightFunction(std::vector<PsiPiece> pieces, double lambda, double shift = 0.0);

  double lambda() const { return lambda_; }
  double shift() const { return shift_; }
  const std::vector<PsiPiece>& pieces() const { return pieces_; }
  WeightFunction with_lambda(double lambda) const;
  WeightFunction with_shift(double shift) const;

  bool covers(const Point2& x) const;
  double psi(const Point2& x) const;
  double value(const Point2& x) const;
  Point2 gradient(const Point2& x) const;
  Hessian2 hessian(const Point2& x) const;

 private:
  const PsiPiece& piece(const Point2& x) const;

  std::vector<PsiPiece> pieces_;
  double lambda_ = 0.0;
  double shift_ = 0.0;
};

enum class SymbolRegion { Plate, Wave };

/// Principal symbol of h^2 e^{phi/h} A e^{-phi/h}:
///   plate: |xi + i grad phi|^2,  wave: |xi + i grad phi|^2 - 1.
struct ConjugatedSymbol {
  SymbolRegion region = SymbolRegion::Wave;
  const WeightFunction* phi = nullptr;

  double constant() const { return region == SymbolRegion::Wave ? 1.0 : 0.0; }
  double re(const Point2& x, const Point2& xi) const;
  double im(const Point2& x, const Point2& xi) const;
  std::complex<double> value(const Point2& x, const Point2& xi) const;
};

/// {Re a, Im a} from closed-form derivatives:
///   4 xi^T H xi + 4 grad phi^T H grad phi.
double poisson_bracket(const ConjugatedSymbol& sym, const Point2& x, const Point2& xi);

/// {Im a, Re a}.
double reversed_bracket(const ConjugatedSymbol& sym, const Point2& x, const Point2& xi);

/// Normalization s = |xi|^2 + |grad phi|^2 + 1 used by the verifiers.
double symbol_scale(const ConjugatedSymbol& sym, const Point2& x, const Point2& xi);

/// Excised critical region. A strip ball uses the distance in x_n only.
struct CriticalBall {
  Point2 center = Point2::Zero();
  double radius = 0.0;
  bool strip = false;
  bool contains(const Point2& x) const;
};

/// Rectangle [xt_lo, xt_hi] x [xn_lo, xn_hi] minus critical balls, sampled on
/// a uniform grid; at each point xi is sampled on a polar grid over the ball
/// of radius (|grad phi|^2 + 2)^{1/2} plus perturbations of the exact
/// characteristic covectors.
struct RegionSampler {
  double xt_lo = 0.0;
  double xt_hi = 1.0;
  std::vector<std::pair<double, double>> xn_intervals;
  std::vector<CriticalBall> balls;
  int nx_t = 3;
  int nx_n = 200;
  int n_radial = 24;
  int n_angular = 32;
  int n_char_perturb = 5;

  std::vector<Point2> points() const;
};

enum class Verdict { Pass, Fail, Vacuous };
std::string to_string(Verdict v);

struct ConditionResult {
  std::string name;
  Verdict verdict = Verdict::Vacuous;
  double margin = 0.0;
  Point2 witness_x = Point2::Zero();
  Point2 witness_xi = Point2::Zero();
  std::size_t samples = 0;
  std::size_t characteristic_samples = 0;
};

struct VerificationReport {
  double epsilon = 1e-2;
  double delta = 1e-3;
  std::vector<ConditionResult> conditions;
  bool all_pass() const;  // no FAIL and no VACUOUS
  bool any_fail() const;
  void append(const VerificationReport& other);
};

/// Sub-ellipticity: a sample (x, xi) is characteristic when |a| / s <= eps;
/// the margin there is bracket / s^{3/2}. PASS when every characteristic
/// sample has margin >= delta, VACUOUS when there are none.
ConditionResult check_subellipticity(const ConjugatedSymbol& sym, const RegionSampler& sampler,
                                     double epsilon = 1e-2, double delta = 1e-3);

/// Gradient nonvanishing at every sampled point outside the balls, with
/// margin min |grad phi| / max |grad phi|.
ConditionResult check_gradient(const WeightFunction& phi, const RegionSampler& sampler,
                               double tolerance = 1e-12);

/// Interface and boundary conditions for the plate weight phi1 and the wave
/// weight phi2 with nu the outward normal of the plate at S and of the wave
/// region at Gamma:
///   continuity phi1 = phi2 on S, d_nu phi1 < 0 and d_nu phi2 < 0 on S,
///   (d_nu phi1)^2 - (d_nu phi2)^2 > 1 on S, d_nu phi2 < 0 on Gamma, and
///   d_nu phi1 != 0 on the boundary of each excised plate ball.
VerificationReport check_interface_conditions(const WeightFunction& phi1,
                                              const WeightFunction& phi2,
                                              const DomainPartition& part,
                                              const std::vector<CriticalBall>& plate_balls = {},
                                              double xt = 0.5,
                                              double continuity_tolerance = 1e-12);

class ConstructionError : public std::runtime_error {
 public:
  ConstructionError(const std::string& what, ConditionResult worst);
  const ConditionResult& worst() const { return worst_; }

 private:
  ConditionResult worst_;
};

struct ExponentiationResult {
  WeightFunction plate;
  WeightFunction wave;
  double lambda = 0.0;
  VerificationReport report;
};

/// Smallest lambda in the grid for which both regions pass gradient and
/// sub-ellipticity checks with margin delta. The grid is scanned in
/// increasing order.
ExponentiationResult hormander_exponentiation(const std::vector<PsiPiece>& plate_psi,
                                              const RegionSampler& plate_region,
                                              const std::vector<PsiPiece>& wave_psi,
                                              const RegionSampler& wave_region,
                                              std::vector<double> lambda_grid,
                                              double epsilon = 1e-2, double delta = 1e-3);

/// Everything checked for a weight pair at once.
VerificationReport verify_weight_pair(const WeightFunction& plate, const RegionSampler& plate_region,
                                      const WeightFunction& wave, const RegionSampler& wave_region,
                                      const DomainPartition& part, double epsilon = 1e-2,
                                      double delta = 1e-3);

/// Phases phi_{region,k} for k = 1, 2 each with its own critical balls.
struct PhasePair {
  WeightFunction first;
  std::vector<CriticalBall> first_balls;
  WeightFunction second;
  std::vector<CriticalBall> second_balls;
};

/// Gradient nonvanishing outside each phase's balls and the cross-ordering
/// second > first on the balls of first, first > second on the balls of
/// second, sampled on `sampler` points (balls of the sampler are ignored).
VerificationReport check_phase_pair(const std::string& label, const PhasePair& pair,
                                    const RegionSampler& sampler);

/// Shipped weights for a partition: wave psi = x_n on the left interval and
/// s_left + s_right - x_n on the right; plate psi = s_left + kappa (w^2 - (x_n - c)^2) with
/// c the plate midpoint and w its half-length, and the excised strip of
/// radius `radius` around c.
struct ShippedWeights {
  std::vector<PsiPiece> plate_psi;
  std::vector<PsiPiece> wave_psi;
  RegionSampler plate_region;
  RegionSampler wave_region;
  CriticalBall strip;
};

ShippedWeights shipped_weights(const DomainPartition& part, double kappa = 5.0,
                               double radius = 0.05);

/// The linear function psi = x_n on both regions (equal normal slopes).
ShippedWeights linear_control(const DomainPartition& part);

}  // namespace platewave
