#include "platewave/semigroup.hpp"

#include "platewave/resolvent.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace platewave {
namespace {

Eigen::SparseMatrix<double> sparse(const RealMatrix& a) { return a.sparseView(0.0, 0.0); }

void check_state(Index n_free, const StateVector& x) {
  if (x.coeffs.size() != 2 * n_free) {
    throw std::invalid_argument("state vector length does not match the free DOF count");
  }
}

}  // namespace

double energy(const DiscreteSystem& sys, const StateVector& x) {
  const Index n = sys.n_free();
  check_state(n, x);
  const auto u = x.coeffs.head(n);
  const auto v = x.coeffs.tail(n);
  return 0.5 * ((sys.stiffness_strain * u).squaredNorm() + v.dot(sys.mass * v));
}

double energy(const GeneratorPencil& pencil, const StateVector& x) {
  const Index n = pencil.n_free();
  check_state(n, x);
  const auto u = x.coeffs.head(n);
  const auto v = x.coeffs.tail(n);
  return 0.5 * ((pencil.stiffness_strain * u).squaredNorm() + v.dot(pencil.mass * v));
}

CrankNicolsonStepper::CrankNicolsonStepper(const GeneratorPencil& pencil, double dt)
    : dt_(dt), n_(pencil.n_free()) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("cn_step: dt must be positive and finite");
  }
  mass_ = sparse(pencil.mass);
  stiffness_ = sparse(pencil.stiffness);
  damping_ = sparse(pencil.damping_matrix);
  stiffness_strain_ = pencil.stiffness_strain;
  damping_strain_ = pencil.damping_strain;
  const Eigen::SparseMatrix<double> shift =
      0.5 * dt * damping_ + (0.25 * dt * dt) * stiffness_;
  lhs_ = mass_ + shift;
  explicit_part_ = mass_ - shift;
  factor_.compute(lhs_);
  if (factor_.info() != Eigen::Success) {
    throw SingularMatrixError(0, 0.0, 0.0);
  }
}

StateVector CrankNicolsonStepper::step(const StateVector& x) const {
  check_state(n_, x);
  const auto u = x.coeffs.head(n_);
  const auto v = x.coeffs.tail(n_);
  const RealVector rhs = explicit_part_ * v - dt_ * (stiffness_ * u);
  StateVector next;
  next.coeffs.resize(2 * n_);
  RealVector vn = factor_.solve(rhs);
  vn += factor_.solve(RealVector(rhs - lhs_ * vn));
  next.coeffs.head(n_) = u + (0.5 * dt_) * (v + vn);
  next.coeffs.tail(n_) = vn;
  next.time = x.time + dt_;
  return next;
}

double CrankNicolsonStepper::dissipation_increment(const StateVector& x,
                                                   const StateVector& next) const {
  const RealVector mid = 0.5 * (x.coeffs.tail(n_) + next.coeffs.tail(n_));
  return dt_ * (damping_strain_ * mid).squaredNorm();
}

double CrankNicolsonStepper::energy(const StateVector& x) const {
  check_state(n_, x);
  const auto u = x.coeffs.head(n_);
  const auto v = x.coeffs.tail(n_);
  return 0.5 * ((stiffness_strain_ * u).squaredNorm() + v.dot(mass_ * v));
}

StateVector cn_step(const GeneratorPencil& pencil, const StateVector& x, double dt) {
  return CrankNicolsonStepper(pencil, dt).step(x);
}

bool Trajectory::is_monotone() const {
  if (energy.empty()) {
    return true;
  }
  const double slack = monotonicity_tolerance * energy.front();
  for (std::size_t i = 1; i < energy.size(); ++i) {
    if (energy[i] > energy[i - 1] + slack) {
      return false;
    }
  }
  return true;
}

Trajectory simulate(const GeneratorPencil& pencil, const StateVector& x0, double dt,
                    int n_steps, int snapshot_stride) {
  if (n_steps < 0) {
    throw std::invalid_argument("simulate: n_steps must be nonnegative");
  }
  if (snapshot_stride < 0) {
    throw std::invalid_argument("simulate: snapshot_stride must be nonnegative");
  }
  const CrankNicolsonStepper stepper(pencil, dt);
  Trajectory traj;
  traj.dt = dt;
  const auto n = static_cast<std::size_t>(n_steps) + 1;
  traj.times.reserve(n);
  traj.energy.reserve(n);
  traj.dissipation_increment.reserve(n);
  traj.cumulative_dissipation.reserve(n);

  StateVector x = x0;
  double cumulative = 0.0;
  traj.times.push_back(x.time);
  traj.energy.push_back(stepper.energy(x));
  traj.dissipation_increment.push_back(0.0);
  traj.cumulative_dissipation.push_back(0.0);
  if (snapshot_stride > 0) {
    traj.snapshots.push_back(x);
  }
  for (int s = 1; s <= n_steps; ++s) {
    StateVector next = stepper.step(x);
    const double inc = stepper.dissipation_increment(x, next);
    cumulative += inc;
    traj.times.push_back(next.time);
    traj.energy.push_back(stepper.energy(next));
    traj.dissipation_increment.push_back(inc);
    traj.cumulative_dissipation.push_back(cumulative);
    x = std::move(next);
    if (snapshot_stride > 0 && s % snapshot_stride == 0) {
      traj.snapshots.push_back(x);
    }
  }
  return traj;
}

RealVector seed_vector(const DiscreteSystem& sys, const SeedDescriptor& seed) {
  const Index n = sys.n_free();
  if (seed.kind == SeedKind::Random) {
    return random_real_vector(2 * n, seed.seed);
  }
  RealVector f = RealVector::Zero(2 * n);
  const double pi = std::numbers::pi;
  auto put = [&](const std::vector<Index>& map, std::size_t i, double value) {
    if (map[i] != ConstraintMap::kFixed) {
      f(map[i]) = value;
    }
  };
  const auto& c = sys.constraints;
  for (std::size_t i = 0; i < sys.mesh.wave_left_nodes.size(); ++i) {
    put(c.wave_left, i, std::sin(pi * sys.mesh.wave_left_nodes[i]));
  }
  for (std::size_t i = 0; i < sys.mesh.wave_right_nodes.size(); ++i) {
    put(c.wave_right, i, std::sin(pi * sys.mesh.wave_right_nodes[i]));
  }
  for (std::size_t j = 0; j < sys.mesh.plate_nodes.size(); ++j) {
    const double x = sys.mesh.plate_nodes[j];
    put(c.plate, 2 * j, std::sin(pi * x));
    put(c.plate, 2 * j + 1, pi * std::cos(pi * x));
  }
  return f;
}

InitialData prepare_initial_data(const DiscreteSystem& sys, const GeneratorPencil& pencil,
                                 const SeedDescriptor& seed, int k) {
  if (k < 0) {
    throw std::invalid_argument("prepare_initial_data: order must be nonnegative");
  }
  InitialData out;
  out.order = k;
  out.seed_data = seed_vector(sys, seed);
  out.state.coeffs = resolvent_smoothing(pencil, out.seed_data, k);
  out.state.time = 0.0;
  out.graph_norm = graph_norm(pencil, out.state.coeffs, k);
  const double fn = energy_gram(pencil).norm(out.seed_data);
  out.amplification = fn > 0.0 ? out.graph_norm / fn : 0.0;
  return out;
}

}  // namespace platewave
