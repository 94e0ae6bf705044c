#pragma once

#include "platewave/assembly.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <vector>

namespace platewave {

/// Free-DOF state x = (U, V) with U, V of length n_free.
struct StateVector {
  RealVector coeffs;
  double time = 0.0;
};

/// E = 1/2 (U^T K U + V^T M V).
double energy(const DiscreteSystem& sys, const StateVector& x);
double energy(const GeneratorPencil& pencil, const StateVector& x);

/// Crank-Nicolson for E x' = A x, solved through the reduced SPD system
///   (M + dt/2 D + dt^2/4 K) V+ = (M - dt/2 D - dt^2/4 K) V - dt K U,
///   U+ = U + dt/2 (V + V+),
/// which is algebraically identical to (E - dt/2 A) x+ = (E + dt/2 A) x.
class CrankNicolsonStepper {
 public:
  CrankNicolsonStepper(const GeneratorPencil& pencil, double dt);

  double dt() const { return dt_; }
  StateVector step(const StateVector& x) const;
  // dt * Vmid^T D Vmid for the step x -> next.
  double dissipation_increment(const StateVector& x, const StateVector& next) const;
  double energy(const StateVector& x) const;

 private:
  double dt_;
  Index n_;
  Eigen::SparseMatrix<double> mass_;
  Eigen::SparseMatrix<double> stiffness_;
  Eigen::SparseMatrix<double> damping_;
  Eigen::SparseMatrix<double> stiffness_strain_;
  Eigen::SparseMatrix<double> damping_strain_;
  Eigen::SparseMatrix<double> lhs_;
  Eigen::SparseMatrix<double> explicit_part_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> factor_;
};

StateVector cn_step(const GeneratorPencil& pencil, const StateVector& x, double dt);

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> energy;
  // entry n is the dissipation over step n-1 -> n; entry 0 is 0
  std::vector<double> dissipation_increment;
  std::vector<double> cumulative_dissipation;
  std::vector<StateVector> snapshots;
  // tolerance for E(t_{n+1}) <= E(t_n) + tol * E(t_0)
  double monotonicity_tolerance = 1e-10;

  std::size_t size() const { return times.size(); }
  bool is_monotone() const;
};

/// Snapshots are kept at steps 0, stride, 2 stride, ...; stride 0 keeps none.
Trajectory simulate(const GeneratorPencil& pencil, const StateVector& x0, double dt,
                    int n_steps, int snapshot_stride = 0);

enum class SeedKind { Smooth, Random };

struct SeedDescriptor {
  SeedKind kind = SeedKind::Smooth;
  std::uint64_t seed = 1;
};

struct InitialData {
  StateVector state;
  RealVector seed_data;  // F
  int order = 0;
  double graph_norm = 0.0;
  // graph_norm / ||F||_Q
  double amplification = 0.0;
};

/// Seed vector F. The smooth profile interpolates u = sin(pi x) on both
/// fields (slopes from the exact derivative on interior plate nodes) with
/// V = 0. The random profile draws every free coefficient from N(0, 1).
RealVector seed_vector(const DiscreteSystem& sys, const SeedDescriptor& seed);

/// x0 = (I - A)^{-k} F, with its k-th graph norm.
InitialData prepare_initial_data(const DiscreteSystem& sys, const GeneratorPencil& pencil,
                                 const SeedDescriptor& seed, int k);

}  // namespace platewave
