#include "platewave/splitting.hpp"

#include "platewave/fem_basis.hpp"
#include "platewave/quadrature.hpp"
#include "platewave/resolvent.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace platewave {
namespace {

ComplexVector mass_solve(const GeneratorPencil& p, const ComplexVector& b) {
  ComplexVector x(b.size());
  x.real() = p.mass_factor.solve(RealVector(b.real()));
  x.imag() = p.mass_factor.solve(RealVector(b.imag()));
  return x;
}

struct TestSpace {
  std::vector<double> nodes;
  // global H^2_0 index of the four local Hermite DOFs of element e, -1 fixed
  Index n = 0;
  Index dof(std::size_t node, int slot) const {
    if (node == 0 || node + 1 == nodes.size()) {
      return -1;
    }
    return static_cast<Index>(2 * (node - 1)) + slot;
  }
};

TestSpace make_test_space(double lo, double hi, int elements) {
  TestSpace t;
  t.nodes.resize(static_cast<std::size_t>(elements) + 1);
  for (int i = 0; i <= elements; ++i) {
    t.nodes[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / elements;
  }
  t.nodes.back() = hi;
  t.n = 2 * (elements - 1);
  return t;
}

// H^2 Gram (K + M) of the H^2_0 Hermite test space.
RealMatrix test_gram(const TestSpace& t) {
  RealMatrix g = RealMatrix::Zero(t.n, t.n);
  for (std::size_t e = 0; e + 1 < t.nodes.size(); ++e) {
    const double h = t.nodes[e + 1] - t.nodes[e];
    const Eigen::Matrix4d ke = hermite_bending_matrix(h) + hermite_mass_matrix(h);
    const std::array<Index, 4> d{t.dof(e, 0), t.dof(e, 1), t.dof(e + 1, 0), t.dof(e + 1, 1)};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (d[i] >= 0 && d[j] >= 0) {
          g(d[i], d[j]) += ke(i, j);
        }
      }
    }
  }
  return g;
}

// Accumulates r_i += int (p(x) phi_i'' + q(x) phi_i) over [lo, hi] where the
// integrand pair (p, q) is supplied pointwise.
template <class Integrand>
void integrate_test(const TestSpace& t, const std::vector<double>& breaks, int gauss,
                    const Integrand& pq, ComplexVector& r) {
  const auto& rule = gauss_legendre(gauss);
  for (std::size_t e = 0; e + 1 < t.nodes.size(); ++e) {
    const double x0 = t.nodes[e];
    const double h = t.nodes[e + 1] - x0;
    const std::array<Index, 4> d{t.dof(e, 0), t.dof(e, 1), t.dof(e + 1, 0), t.dof(e + 1, 1)};
    const auto pieces = merge_breakpoints(x0, t.nodes[e + 1], breaks);
    for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
      const double half = 0.5 * (pieces[p + 1] - pieces[p]);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = pieces[p] + half * (rule.nodes[q] + 1.0);
        const double w = half * rule.weights[q];
        const auto [pv, qv] = pq(x);
        const double s = (x - x0) / h;
        const auto n0 = fem::hermite(s, h);
        const auto n2 = fem::hermite_d2(s, h);
        for (int i = 0; i < 4; ++i) {
          if (d[i] >= 0) {
            r(d[i]) += w * (pv * n2[i] + qv * n0[i]);
          }
        }
      }
    }
  }
}

double dual_norm(const Eigen::LLT<RealMatrix>& g, const ComplexVector& r) {
  RealMatrix parts(r.size(), 2);
  parts.col(0) = r.real();
  parts.col(1) = r.imag();
  const RealMatrix y = g.solve(parts);
  return std::sqrt(std::max(0.0, parts.col(0).dot(y.col(0)) + parts.col(1).dot(y.col(1))));
}

std::vector<double> with_breaks(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

StationarySolution solve_stationary(const DiscreteSystem& sys, const GeneratorPencil& pencil,
                                    double mu, const StationaryData& data) {
  const Index n = sys.n_free();
  ComplexVector f(2 * n);
  f.head(n) = mass_solve(pencil, load_vector(sys, data.f1, data.f2));
  f.tail(n) = mass_solve(pencil, load_vector(sys, data.g1, data.g2));
  // (A - i mu) X = F  <=>  X = -(i mu - A)^{-1} F
  const ShiftedSolver solver(pencil, Complex(0.0, mu));
  const ComplexVector x = -solver.solve(f);
  return {x.head(n), x.tail(n)};
}

SplittingReport splitting_residual(const DiscreteSystem& sys, double mu,
                                   const StationarySolution& sol, const StationaryData& data,
                                   const SplittingOptions& options) {
  if (mu == 0.0 || !std::isfinite(mu)) {
    throw std::invalid_argument("splitting_residual: mu must be nonzero and finite");
  }
  if (options.test_elements < 2) {
    throw std::invalid_argument("splitting_residual: need at least two test elements");
  }
  const Index n = sys.n_free();
  if (sol.u.size() != n || sol.v.size() != n) {
    throw std::invalid_argument("splitting_residual: solution size mismatch");
  }
  const double am = std::abs(mu);
  const Complex imu(0.0, mu);
  const DomainPartition& part = sys.partition;
  SplittingReport rep;
  rep.mu = mu;

  auto z_plate = [&](double x) {
    const FieldJet u = eval_plate(sys, sol.u, x);
    const FieldJet v = eval_plate(sys, sol.v, x);
    const double a = eval_damping(sys.damping, x);
    const Complex z2 = u.d2 + a * v.d2;
    struct Z {
      Complex zp, zpp, av2;
    };
    return Z{z2 - am * u.value, z2, a * v.d2};
  };
  auto phi1 = [&](double x) { return data.g1(x) + imu * data.f1(x); };
  auto phi2 = [&](double x) { return data.g2(x) + imu * data.f2(x); };

  // plate equations
  {
    const TestSpace t = make_test_space(part.s_left, part.s_right, options.test_elements);
    const std::vector<double> breaks =
        with_breaks(sys.mesh.plate_nodes, damping_breakpoints(sys.damping));
    const Eigen::LLT<RealMatrix> g(test_gram(t));
    ComplexVector r1 = ComplexVector::Zero(t.n);
    ComplexVector r2 = ComplexVector::Zero(t.n);
    integrate_test(t, breaks, options.gauss_points,
                   [&](double x) {
                     const auto z = z_plate(x);
                     return std::pair<Complex, Complex>{
                         -z.zp, -am * z.zp - (phi1(x) - am * z.av2)};
                   },
                   r1);
    integrate_test(t, breaks, options.gauss_points,
                   [&](double x) {
                     const auto z = z_plate(x);
                     return std::pair<Complex, Complex>{
                         -z.zpp, am * z.zpp - (phi1(x) + am * z.zp)};
                   },
                   r2);
    rep.residual[0] = dual_norm(g, r1);
    rep.residual[1] = dual_norm(g, r2);
  }
  // wave equation on both intervals
  {
    double total = 0.0;
    for (int side = 0; side < 2; ++side) {
      const double lo = side == 0 ? part.outer_left : part.s_right;
      const double hi = side == 0 ? part.s_left : part.outer_right;
      const auto& nodes = side == 0 ? sys.mesh.wave_left_nodes : sys.mesh.wave_right_nodes;
      const TestSpace t = make_test_space(lo, hi, options.test_elements);
      const Eigen::LLT<RealMatrix> g(test_gram(t));
      ComplexVector r = ComplexVector::Zero(t.n);
      integrate_test(t, nodes, options.gauss_points,
                     [&](double x) {
                       const Complex z2 = -eval_wave(sys, sol.u, x).value;
                       return std::pair<Complex, Complex>{-z2, -mu * mu * z2 - phi2(x)};
                     },
                     r);
      const double d = dual_norm(g, r);
      total += d * d;
    }
    rep.residual[2] = std::sqrt(total);
  }
  // interface traces
  for (int side = 0; side < 2; ++side) {
    const double s = side == 0 ? part.s_left : part.s_right;
    const bool plate_from_right = side == 0;
    const FieldJet u = eval_plate(sys, sol.u, s, plate_from_right);
    const FieldJet v = eval_plate(sys, sol.v, s, plate_from_right);
    const FieldJet w = eval_wave(sys, sol.u, s, !plate_from_right);
    const double a = eval_damping(sys.damping, s);
    const Complex zpp = u.d2 + a * v.d2;
    const Complex zp = zpp - am * u.value;
    const Complex dzpp = u.d3 + a * v.d3;
    const Complex dzp = dzpp - am * u.d1;
    const Complex z2 = -w.value;
    const Complex dz2 = -w.d1;
    const Complex theta = -zp + 2.0 * zpp;
    rep.interface_mismatch[static_cast<std::size_t>(side)] = {
        std::abs(zp - zpp - am * z2), std::abs(dzp - dz2), std::abs(zpp - theta - am * z2),
        std::abs(dzpp - dz2)};
  }
  return rep;
}

ManufacturedSolution::ManufacturedSolution(const DomainPartition& part,
                                           const DampingProfile& a, double mu)
    : part_(part), a_(a), mu_(mu) {}

std::array<double, 5> ManufacturedSolution::plate_jet(double x) const {
  const double len = part_.plate_length();
  const double t = (x - part_.s_left) / len;
  const double pi = std::numbers::pi;
  std::array<double, 5> out{};
  for (int k = 0; k <= 4; ++k) {
    const double phase = k * pi / 2.0;
    const double c1 = std::pow(pi, k) * std::cos(pi * t + phase);
    const double c2 = std::pow(2.0 * pi, k) * std::cos(2.0 * pi * t + phase);
    double p = 0.0;
    switch (k) {
      case 0: p = t * t - 2.0 * t * t * t + t * t * t * t; break;
      case 1: p = 2.0 * t - 6.0 * t * t + 4.0 * t * t * t; break;
      case 2: p = 2.0 - 12.0 * t + 12.0 * t * t; break;
      case 3: p = -12.0 + 24.0 * t; break;
      default: p = 24.0; break;
    }
    const double dt = (k == 0 ? alpha_ : 0.0) + beta_ * c1 + gamma_ * c2 + eps_ * p;
    out[static_cast<std::size_t>(k)] = dt / std::pow(len, k);
  }
  return out;
}

std::array<double, 3> ManufacturedSolution::wave_jet(double x) const {
  const double pi = std::numbers::pi;
  const double len3 = std::pow(part_.plate_length(), 3);
  if (x <= part_.s_left) {
    const double sl = part_.s_left;
    const double amp = plate_jet(sl)[0];
    const double kappa = pi / (2.0 * sl);
    const double c = 12.0 * eps_ / (len3 * sl);
    return {amp * std::sin(kappa * x) + c * x * (x - sl),
            amp * kappa * std::cos(kappa * x) + c * (2.0 * x - sl),
            -amp * kappa * kappa * std::sin(kappa * x) + 2.0 * c};
  }
  const double sr = part_.s_right;
  const double amp = plate_jet(sr)[0];
  const double kappa = pi / (2.0 * (1.0 - sr));
  const double c = -12.0 * eps_ / (len3 * (1.0 - sr));
  const double arg = kappa * (1.0 - x);
  return {amp * std::sin(arg) + c * (1.0 - x) * (x - sr),
          -amp * kappa * std::cos(arg) + c * (1.0 + sr - 2.0 * x),
          -amp * kappa * kappa * std::sin(arg) - 2.0 * c};
}

StationaryData ManufacturedSolution::data() const {
  StationaryData d;
  const double mu = mu_;
  d.g1 = [*this, mu](double x) {
    const auto u = plate_jet(x);
    const DampingJet a = eval_damping_jet(a_, x);
    const double au = a.d2 * u[2] + 2.0 * a.d1 * u[3] + a.value * u[4];
    return Complex(mu * mu * u[0] - u[4], -mu * au);
  };
  d.g2 = [*this, mu](double x) {
    const auto w = wave_jet(x);
    return Complex(w[2] + mu * mu * w[0], 0.0);
  };
  return d;
}

SplittingStudy splitting_study(const DomainPartition& part, const DampingProfile& a, double mu,
                               int base_elements, int levels,
                               const SplittingOptions& options) {
  if (base_elements < 2 || levels < 2) {
    throw std::invalid_argument("splitting_study: need base_elements >= 2 and levels >= 2");
  }
  SplittingStudy study;
  study.mu = mu;
  const ManufacturedSolution exact(part, a, mu);
  const StationaryData data = exact.data();
  for (int l = 0; l < levels; ++l) {
    const int n = base_elements << l;
    const Mesh mesh = build_mesh(part, n, n);
    const DiscreteSystem sys = assemble(part, a, mesh);
    const GeneratorPencil pencil = build_generator(sys);
    const StationarySolution sol = solve_stationary(sys, pencil, mu, data);
    study.elements.push_back(n);
    study.h.push_back(mesh.max_element_size());
    study.reports.push_back(splitting_residual(sys, mu, sol, data, options));
  }
  study.decreasing = true;
  for (std::size_t j = 0; j < 3; ++j) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(levels);
    for (std::size_t l = 0; l < study.reports.size(); ++l) {
      const double x = std::log(study.h[l]);
      const double y = std::log(study.reports[l].residual[j]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      if (l > 0 && !(study.reports[l].residual[j] < study.reports[l - 1].residual[j])) {
        study.decreasing = false;
      }
    }
    study.order[j] = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return study;
}

}  // namespace platewave
