#include "platewave/assembly.hpp"

#include "platewave/fem_basis.hpp"
#include "platewave/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace platewave {
namespace {

constexpr int kDampingGauss = 4;

// Element index containing x in an increasing node list, preferring the
// element to the right of a node unless from_right is false.
std::size_t locate(const std::vector<double>& nodes, double x, bool from_right) {
  const std::size_t ne = nodes.size() - 1;
  auto it = from_right ? std::upper_bound(nodes.begin(), nodes.end(), x)
                       : std::lower_bound(nodes.begin(), nodes.end(), x);
  std::size_t e = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
  return std::min(e, ne - 1);
}

void scatter(RealMatrix& global, const std::vector<Index>& map,
             const std::array<Index, 4>& local_dofs, const Eigen::Matrix4d& ke) {
  for (int i = 0; i < 4; ++i) {
    const Index gi = map[static_cast<std::size_t>(local_dofs[i])];
    if (gi == ConstraintMap::kFixed) {
      continue;
    }
    for (int j = 0; j < 4; ++j) {
      const Index gj = map[static_cast<std::size_t>(local_dofs[j])];
      if (gj != ConstraintMap::kFixed) {
        global(gi, gj) += ke(i, j);
      }
    }
  }
}

void scatter(RealMatrix& global, const std::vector<Index>& map, Index a, Index b,
             const Eigen::Matrix2d& ke) {
  const std::array<Index, 2> g{map[static_cast<std::size_t>(a)],
                               map[static_cast<std::size_t>(b)]};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (g[i] != ConstraintMap::kFixed && g[j] != ConstraintMap::kFixed) {
        global(g[i], g[j]) += ke(i, j);
      }
    }
  }
}

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_row(Triplets& t, Index row, const std::vector<Index>& map,
             const std::array<Index, 4>& local_dofs, const std::array<double, 4>& coeffs) {
  for (int i = 0; i < 4; ++i) {
    const Index g = map[static_cast<std::size_t>(local_dofs[i])];
    if (g != ConstraintMap::kFixed && coeffs[i] != 0.0) {
      t.emplace_back(row, g, coeffs[i]);
    }
  }
}

}  // namespace

AssemblyError::AssemblyError(const std::string& what, RealVector null_vector)
    : std::runtime_error(what), null_vector_(std::move(null_vector)) {}

RealMatrix ConstraintMap::matrix() const {
  const Index rows =
      static_cast<Index>(plate.size() + wave_left.size() + wave_right.size());
  RealMatrix c = RealMatrix::Zero(rows, n_free);
  Index r = 0;
  for (const auto* map : {&plate, &wave_left, &wave_right}) {
    for (Index g : *map) {
      if (g != kFixed) {
        c(r, g) = 1.0;
      }
      ++r;
    }
  }
  return c;
}

ConstraintMap make_constraints(const Mesh& mesh) {
  ConstraintMap c;
  const std::size_t nwl = mesh.wave_left_nodes.size();
  const std::size_t np = mesh.plate_nodes.size();
  const std::size_t nwr = mesh.wave_right_nodes.size();
  c.wave_left.assign(nwl, ConstraintMap::kFixed);
  c.plate.assign(2 * np, ConstraintMap::kFixed);
  c.wave_right.assign(nwr, ConstraintMap::kFixed);

  Index next = 0;
  for (std::size_t i = 1; i + 1 < nwl; ++i) {
    c.wave_left[i] = next++;
  }
  // shared interface value at s_left
  c.wave_left[nwl - 1] = next;
  c.plate[0] = next++;
  for (std::size_t j = 1; j + 1 < np; ++j) {
    c.plate[2 * j] = next++;
    c.plate[2 * j + 1] = next++;
  }
  c.plate[2 * (np - 1)] = next;
  c.wave_right[0] = next++;
  for (std::size_t i = 1; i + 1 < nwr; ++i) {
    c.wave_right[i] = next++;
  }
  c.n_free = next;
  return c;
}

Eigen::Matrix4d hermite_bending_matrix(double h) {
  Eigen::Matrix4d k;
  const double h2 = h * h;
  k << 12.0, 6.0 * h, -12.0, 6.0 * h,
       6.0 * h, 4.0 * h2, -6.0 * h, 2.0 * h2,
       -12.0, -6.0 * h, 12.0, -6.0 * h,
       6.0 * h, 2.0 * h2, -6.0 * h, 4.0 * h2;
  return k / (h2 * h);
}

Eigen::Matrix4d hermite_mass_matrix(double h) {
  Eigen::Matrix4d m;
  const double h2 = h * h;
  m << 156.0, 22.0 * h, 54.0, -13.0 * h,
       22.0 * h, 4.0 * h2, 13.0 * h, -3.0 * h2,
       54.0, 13.0 * h, 156.0, -22.0 * h,
       -13.0 * h, -3.0 * h2, -22.0 * h, 4.0 * h2;
  return m * (h / 420.0);
}

Eigen::Matrix4d hermite_damping_matrix(const DampingProfile& a, double x0, double h) {
  Eigen::Matrix4d d = Eigen::Matrix4d::Zero();
  if (a.is_zero() || x0 + h <= a.omega_left || x0 >= a.omega_right) {
    return d;
  }
  const auto& rule = gauss_legendre(kDampingGauss);
  const auto bp = damping_breakpoints(a);
  const auto pieces = merge_breakpoints(x0, x0 + h, bp);
  for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
    const double lo = pieces[p];
    const double hi = pieces[p + 1];
    const double half = 0.5 * (hi - lo);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = lo + half * (rule.nodes[q] + 1.0);
      const double w = half * rule.weights[q] * eval_damping(a, x);
      if (w == 0.0) {
        continue;
      }
      const auto b = fem::hermite_d2((x - x0) / h, h);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          d(i, j) += w * b[i] * b[j];
        }
      }
    }
  }
  return d;
}

Eigen::Matrix2d hat_stiffness_matrix(double h) {
  Eigen::Matrix2d k;
  k << 1.0, -1.0, -1.0, 1.0;
  return k / h;
}

Eigen::Matrix2d hat_mass_matrix(double h) {
  Eigen::Matrix2d m;
  m << 2.0, 1.0, 1.0, 2.0;
  return m * (h / 6.0);
}

DiscreteSystem assemble(const DomainPartition& part, const DampingProfile& a,
                        const Mesh& mesh) {
  const double tol = 1e-14;
  if (std::abs(mesh.plate_nodes.front() - part.s_left) > tol ||
      std::abs(mesh.plate_nodes.back() - part.s_right) > tol ||
      std::abs(mesh.wave_left_nodes.back() - part.s_left) > tol ||
      std::abs(mesh.wave_right_nodes.front() - part.s_right) > tol) {
    throw MeshError("assemble: meshes do not conform at the interface");
  }
  DiscreteSystem sys;
  sys.partition = part;
  sys.damping = a;
  sys.mesh = mesh;
  sys.constraints = make_constraints(mesh);
  const Index n = sys.constraints.n_free;
  sys.mass = RealMatrix::Zero(n, n);
  sys.stiffness = RealMatrix::Zero(n, n);
  sys.damping_matrix = RealMatrix::Zero(n, n);

  Triplets gk;
  Triplets gd;
  Index rk = 0;
  Index rd = 0;
  const auto& rule = gauss_legendre(kDampingGauss);
  const auto bp = damping_breakpoints(a);

  const auto& pn = mesh.plate_nodes;
  for (std::size_t e = 0; e + 1 < pn.size(); ++e) {
    const double h = pn[e + 1] - pn[e];
    const std::array<Index, 4> dofs{static_cast<Index>(2 * e), static_cast<Index>(2 * e + 1),
                                    static_cast<Index>(2 * e + 2),
                                    static_cast<Index>(2 * e + 3)};
    scatter(sys.stiffness, sys.constraints.plate, dofs, hermite_bending_matrix(h));
    scatter(sys.mass, sys.constraints.plate, dofs, hermite_mass_matrix(h));
    scatter(sys.damping_matrix, sys.constraints.plate, dofs,
            hermite_damping_matrix(a, pn[e], h));

    // u'' is linear on the element: int u''^2 = h/3 (c0^2 + c0 c1 + c1^2)
    // = h/3 (c0 + c1/2)^2 + h/4 c1^2
    const auto c0 = fem::hermite_d2(0.0, h);
    const auto c1 = fem::hermite_d2(1.0, h);
    std::array<double, 4> r0{};
    std::array<double, 4> r1{};
    for (int i = 0; i < 4; ++i) {
      r0[i] = std::sqrt(h / 3.0) * (c0[i] + 0.5 * c1[i]);
      r1[i] = std::sqrt(h / 4.0) * c1[i];
    }
    add_row(gk, rk++, sys.constraints.plate, dofs, r0);
    add_row(gk, rk++, sys.constraints.plate, dofs, r1);

    if (!a.is_zero() && pn[e] + h > a.omega_left && pn[e] < a.omega_right) {
      const auto pieces = merge_breakpoints(pn[e], pn[e] + h, bp);
      for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
        const double half = 0.5 * (pieces[p + 1] - pieces[p]);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double x = pieces[p] + half * (rule.nodes[q] + 1.0);
          const double w = half * rule.weights[q] * eval_damping(a, x);
          if (w <= 0.0) {
            continue;
          }
          auto b = fem::hermite_d2((x - pn[e]) / h, h);
          for (double& c : b) {
            c *= std::sqrt(w);
          }
          add_row(gd, rd++, sys.constraints.plate, dofs, b);
        }
      }
    }
  }
  auto add_wave = [&](const std::vector<double>& nodes, const std::vector<Index>& map) {
    for (std::size_t e = 0; e + 1 < nodes.size(); ++e) {
      const double h = nodes[e + 1] - nodes[e];
      scatter(sys.stiffness, map, static_cast<Index>(e), static_cast<Index>(e + 1),
              hat_stiffness_matrix(h));
      scatter(sys.mass, map, static_cast<Index>(e), static_cast<Index>(e + 1),
              hat_mass_matrix(h));
      const double s = 1.0 / std::sqrt(h);
      for (const auto& [dof, c] : {std::pair{e, -s}, std::pair{e + 1, s}}) {
        const Index g = map[dof];
        if (g != ConstraintMap::kFixed) {
          gk.emplace_back(rk, g, c);
        }
      }
      ++rk;
    }
  };
  add_wave(mesh.wave_left_nodes, sys.constraints.wave_left);
  add_wave(mesh.wave_right_nodes, sys.constraints.wave_right);
  sys.stiffness_strain.resize(rk, n);
  sys.stiffness_strain.setFromTriplets(gk.begin(), gk.end());
  sys.damping_strain.resize(rd, n);
  sys.damping_strain.setFromTriplets(gd.begin(), gd.end());

  Eigen::LLT<RealMatrix> chol(sys.stiffness);
  if (chol.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(sys.stiffness);
    std::ostringstream msg;
    msg << "assemble: stiffness matrix is singular on free DOFs (smallest "
           "eigenvalue "
        << es.eigenvalues()(0) << ")";
    throw AssemblyError(msg.str(), es.eigenvectors().col(0));
  }
  return sys;
}

GeneratorPencil build_generator(const DiscreteSystem& sys) {
  const Index n = sys.n_free();
  GeneratorPencil p;
  p.mass = sys.mass;
  p.stiffness = sys.stiffness;
  p.damping_matrix = sys.damping_matrix;
  p.stiffness_strain = sys.stiffness_strain;
  p.damping_strain = sys.damping_strain;
  p.e = RealMatrix::Zero(2 * n, 2 * n);
  p.e.topLeftCorner(n, n).setIdentity();
  p.e.bottomRightCorner(n, n) = sys.mass;
  p.a = RealMatrix::Zero(2 * n, 2 * n);
  p.a.topRightCorner(n, n).setIdentity();
  p.a.bottomLeftCorner(n, n) = -sys.stiffness;
  p.a.bottomRightCorner(n, n) = -sys.damping_matrix;
  p.mass_factor.compute(sys.mass);
  if (p.mass_factor.info() != Eigen::Success) {
    throw AssemblyError("build_generator: mass matrix is not positive definite",
                        RealVector());
  }
  return p;
}

BlockGram energy_gram(const GeneratorPencil& pencil) {
  return BlockGram({pencil.stiffness, pencil.mass});
}

RealVector apply_generator(const GeneratorPencil& pencil, const RealVector& x) {
  const Index n = pencil.n_free();
  RealVector y(2 * n);
  const auto u = x.head(n);
  const auto v = x.tail(n);
  y.head(n) = v;
  y.tail(n) = pencil.mass_factor.solve(
      RealVector(-pencil.stiffness * u - pencil.damping_matrix * v));
  return y;
}

ComplexVector apply_generator(const GeneratorPencil& pencil, const ComplexVector& x) {
  ComplexVector y(x.size());
  const RealVector re = apply_generator(pencil, RealVector(x.real()));
  const RealVector im = apply_generator(pencil, RealVector(x.imag()));
  y.real() = re;
  y.imag() = im;
  return y;
}

double energy_inner(const GeneratorPencil& pencil, const RealVector& x,
                    const RealVector& y) {
  const Index n = pencil.n_free();
  return y.head(n).dot(pencil.stiffness * x.head(n)) +
         y.tail(n).dot(pencil.mass * x.tail(n));
}

double graph_norm(const GeneratorPencil& pencil, const RealVector& x, int k) {
  if (k < 0) {
    throw std::invalid_argument("graph_norm: order must be nonnegative");
  }
  double total = 0.0;
  RealVector y = x;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) {
      y = apply_generator(pencil, y);
    }
    total += energy_inner(pencil, y, y);
  }
  return std::sqrt(std::max(0.0, total));
}

FieldJet eval_plate(const DiscreteSystem& sys, const ComplexVector& free_u, double x,
                    bool from_right) {
  const auto& nodes = sys.mesh.plate_nodes;
  const std::size_t e = locate(nodes, x, from_right);
  const double h = nodes[e + 1] - nodes[e];
  const double t = (x - nodes[e]) / h;
  Complex c[4];
  for (int i = 0; i < 4; ++i) {
    const Index g = sys.constraints.plate[2 * e + static_cast<std::size_t>(i)];
    c[i] = g == ConstraintMap::kFixed ? Complex(0.0) : free_u(g);
  }
  const auto n0 = fem::hermite(t, h);
  const auto n1 = fem::hermite_d1(t, h);
  const auto n2 = fem::hermite_d2(t, h);
  const auto n3 = fem::hermite_d3(t, h);
  FieldJet jet;
  for (int i = 0; i < 4; ++i) {
    jet.value += c[i] * n0[i];
    jet.d1 += c[i] * n1[i];
    jet.d2 += c[i] * n2[i];
    jet.d3 += c[i] * n3[i];
  }
  return jet;
}

FieldJet eval_wave(const DiscreteSystem& sys, const ComplexVector& free_u, double x,
                   bool from_right) {
  const bool left = x <= sys.partition.s_left;
  const auto& nodes = left ? sys.mesh.wave_left_nodes : sys.mesh.wave_right_nodes;
  const auto& map = left ? sys.constraints.wave_left : sys.constraints.wave_right;
  const std::size_t e = locate(nodes, x, from_right);
  const double h = nodes[e + 1] - nodes[e];
  const double t = (x - nodes[e]) / h;
  const Complex ca = map[e] == ConstraintMap::kFixed ? Complex(0.0) : free_u(map[e]);
  const Complex cb =
      map[e + 1] == ConstraintMap::kFixed ? Complex(0.0) : free_u(map[e + 1]);
  FieldJet jet;
  jet.value = ca * (1.0 - t) + cb * t;
  jet.d1 = (cb - ca) / h;
  return jet;
}

ComplexVector load_vector(const DiscreteSystem& sys,
                          const std::function<Complex(double)>& plate_density,
                          const std::function<Complex(double)>& wave_density,
                          int gauss_points) {
  const auto& rule = gauss_legendre(gauss_points);
  ComplexVector b = ComplexVector::Zero(sys.n_free());
  const auto bp = damping_breakpoints(sys.damping);
  const auto& pn = sys.mesh.plate_nodes;
  for (std::size_t e = 0; e + 1 < pn.size(); ++e) {
    const double h = pn[e + 1] - pn[e];
    const auto pieces = merge_breakpoints(pn[e], pn[e + 1], bp);
    for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
      const double half = 0.5 * (pieces[p + 1] - pieces[p]);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = pieces[p] + half * (rule.nodes[q] + 1.0);
        const Complex f = plate_density(x) * (half * rule.weights[q]);
        const auto n0 = fem::hermite((x - pn[e]) / h, h);
        for (int i = 0; i < 4; ++i) {
          const Index g = sys.constraints.plate[2 * e + static_cast<std::size_t>(i)];
          if (g != ConstraintMap::kFixed) {
            b(g) += f * n0[i];
          }
        }
      }
    }
  }
  auto add_wave = [&](const std::vector<double>& nodes, const std::vector<Index>& map) {
    for (std::size_t e = 0; e + 1 < nodes.size(); ++e) {
      const double h = nodes[e + 1] - nodes[e];
      const double half = 0.5 * h;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = 0.5 * (rule.nodes[q] + 1.0);
        const double x = nodes[e] + h * t;
        const Complex f = wave_density(x) * (half * rule.weights[q]);
        if (map[e] != ConstraintMap::kFixed) {
          b(map[e]) += f * (1.0 - t);
        }
        if (map[e + 1] != ConstraintMap::kFixed) {
          b(map[e + 1]) += f * t;
        }
      }
    }
  };
  add_wave(sys.mesh.wave_left_nodes, sys.constraints.wave_left);
  add_wave(sys.mesh.wave_right_nodes, sys.constraints.wave_right);
  return b;
}

std::array<Complex, 2> interface_flux_jump(const DiscreteSystem& sys,
                                           const ComplexVector& free_u) {
  const double sl = sys.partition.s_left;
  const double sr = sys.partition.s_right;
  const Complex left = eval_plate(sys, free_u, sl, true).d3 +
                       eval_wave(sys, free_u, sl, false).d1;
  const Complex right = eval_plate(sys, free_u, sr, false).d3 +
                        eval_wave(sys, free_u, sr, true).d1;
  return {left, right};
}

}  // namespace platewave
