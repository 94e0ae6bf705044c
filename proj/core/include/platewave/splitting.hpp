#pragma once

#include "platewave/assembly.hpp"

#include <array>
#include <functional>
#include <vector>

namespace platewave {

/// Displacement and velocity free coefficients of a stationary solution.
struct StationarySolution {
  ComplexVector u;
  ComplexVector v;
};

/// Right-hand side (f, g) of (A - i mu) X = (f, g): f1, g1 on the plate and
/// f2, g2 on the wave region.
struct StationaryData {
  std::function<Complex(double)> f1 = [](double) { return Complex(0.0); };
  std::function<Complex(double)> g1 = [](double) { return Complex(0.0); };
  std::function<Complex(double)> f2 = [](double) { return Complex(0.0); };
  std::function<Complex(double)> g2 = [](double) { return Complex(0.0); };
};

/// Galerkin solve of (A - i mu) X = (f, g) with f and g entering through
/// their L2 projections.
StationarySolution solve_stationary(const DiscreteSystem& sys, const GeneratorPencil& pencil,
                                    double mu, const StationaryData& data);

struct SplittingOptions {
  // per subinterval of the H^2_0 test space; odd so that it never nests in a
  // dyadic trial mesh, where Galerkin orthogonality leaves only round-off
  int test_elements = 15;
  int gauss_points = 6;
};

struct SplittingReport {
  double mu = 0.0;
  // dual-norm residuals of the equations for z1', z1'' and z2
  std::array<double, 3> residual{};
  // per interface point, |z1' - z1'' - |mu| z2|, |d z1' - d z2|,
  // |z1'' - theta - |mu| z2| and |d z1'' - d z2| with theta = -z1' + 2 z1''
  std::array<std::array<double, 4>, 2> interface_mismatch{};
};

/// With z1' = u1'' + a v1'' - |mu| u1, z1'' = u1'' + a v1'', z2 = -u2 formed
/// from the discrete fields, evaluates in the dual norm of H^2_0 the interior
/// residuals of
///   -(z1')''  - |mu| z1'  = Phi1 - |mu| a v1''
///   -(z1'')'' + |mu| z1'' = Phi1 + |mu| z1'
///   -z2''     - mu^2 z2   = Phi2
/// with Phi = g + i mu f, tested ultraweakly against Hermite functions.
SplittingReport splitting_residual(const DiscreteSystem& sys, double mu,
                                   const StationarySolution& sol, const StationaryData& data,
                                   const SplittingOptions& options = {});

/// Smooth exact solution of the stationary problem with f = 0 and v = i mu u,
/// satisfying every transmission condition exactly.
class ManufacturedSolution {
 public:
  ManufacturedSolution(const DomainPartition& part, const DampingProfile& a, double mu);

  // derivatives 0..4 of u1 at a plate point
  std::array<double, 5> plate_jet(double x) const;
  // derivatives 0..2 of u2 at a wave point
  std::array<double, 3> wave_jet(double x) const;

  StationaryData data() const;

 private:
  DomainPartition part_;
  DampingProfile a_;
  double mu_;
  double alpha_ = 0.3;
  double beta_ = 0.5;
  double gamma_ = 0.2;
  double eps_ = 0.002;
};

/// Refinement study on the manufactured solution: level l uses
/// base_elements * 2^l elements on the plate and on each wave interval.
struct SplittingStudy {
  double mu = 0.0;
  std::vector<int> elements;
  std::vector<double> h;  // largest element size per level
  std::vector<SplittingReport> reports;
  // least-squares slope of log residual against log h
  std::array<double, 3> order{};
  // every residual decreases from each level to the next
  bool decreasing = false;
};

SplittingStudy splitting_study(const DomainPartition& part, const DampingProfile& a, double mu,
                               int base_elements, int levels,
                               const SplittingOptions& options = {});

}  // namespace platewave
