#include <doctest.h>

#include "oracles.hpp"
#include "platewave/assembly.hpp"
#include "platewave/resolvent.hpp"
#include "platewave/semigroup.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace platewave;

namespace {

struct Fixture {
  DomainPartition part = make_partition(0.1, 0.9);
  DampingProfile a = make_damping(part, 0.15, 0.85, 1.0, 0.05);
};

double max_abs(const RealMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Hermite bending matrix") {
  for (double h : {1.0, 0.3, 0.0125}) {
    Eigen::Matrix4d expected;
    const double h2 = h * h;
    expected << 12, 6 * h, -12, 6 * h, 6 * h, 4 * h2, -6 * h, 2 * h2, -12, -6 * h, 12, -6 * h, 6 * h,
        2 * h2, -6 * h, 4 * h2;
    expected /= h2 * h;
    const Eigen::Matrix4d k = hermite_bending_matrix(h);
    CHECK(max_abs(k - expected) <= 1e-13 * max_abs(expected));
    CHECK(max_abs(k - oracle::bending_by_quadrature(h)) <= 1e-11 * max_abs(expected));
  }
}

TEST_CASE("Hermite mass matrix against quadrature") {
  for (double h : {1.0, 0.07}) {
    const Eigen::Matrix4d m = hermite_mass_matrix(h);
    CHECK(max_abs(m - oracle::mass_by_quadrature(h)) <= 1e-13 * max_abs(m));
  }
}

TEST_CASE("Hermite damping matrix against quadrature") {
  Fixture f;
  // elements straddling the support end, the peak and the interior
  for (double x0 : {0.14, 0.3, 0.49, 0.7}) {
    const double h = 0.02;
    const Eigen::Matrix4d d = hermite_damping_matrix(f.a, x0, h);
    Eigen::Matrix4d ref;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        ref(i, j) = oracle::integrate(
            [&](double x) {
              return eval_damping(f.a, x) * oracle::hermite_shape(i, 2, x, x0, h) *
                     oracle::hermite_shape(j, 2, x, x0, h);
            },
            x0, x0 + h, 400);
      }
    }
    CHECK(max_abs(d - ref) <= 1e-9 * max_abs(ref));
  }
}

TEST_CASE("P1 stiffness and mass interior rows") {
  Fixture f;
  const auto mesh = build_mesh(f.part, 6, 10);
  const auto sys = assemble(f.part, f.a, mesh);
  const double h = 0.1 / 10;
  const auto& map = sys.constraints.wave_left;
  for (std::size_t j = 2; j + 2 < map.size(); ++j) {
    const Index i = map[j];
    CHECK(sys.stiffness(i, map[j - 1]) == doctest::Approx(-1.0 / h).epsilon(1e-12));
    CHECK(sys.stiffness(i, i) == doctest::Approx(2.0 / h).epsilon(1e-12));
    CHECK(sys.stiffness(i, map[j + 1]) == doctest::Approx(-1.0 / h).epsilon(1e-12));
    CHECK(sys.mass(i, i) == doctest::Approx(4.0 * h / 6.0).epsilon(1e-12));
    CHECK(sys.mass(i, map[j + 1]) == doctest::Approx(h / 6.0).epsilon(1e-12));
    // row sum of the stiffness is zero away from the boundary
    CHECK(std::abs(sys.stiffness.row(i).sum()) <= 1e-10 / h);
  }
}

TEST_CASE("zero damping gives a zero damping matrix") {
  Fixture f;
  const auto mesh = build_mesh(f.part, 8, 8);
  const auto sys = assemble(f.part, zero_damping(f.part), mesh);
  CHECK(sys.damping_matrix.isZero(0.0));
  CHECK(sys.damping_strain.nonZeros() == 0);
}

TEST_CASE("matrix structure: symmetry and definiteness") {
  Fixture f;
  for (int state : {40, 200, 400}) {
    const auto mesh = build_mesh_for_state_size(f.part, state);
    const auto sys = assemble(f.part, f.a, mesh);
    CHECK(sys.state_size() == state);
    CHECK(max_abs(sys.mass - sys.mass.transpose()) == 0.0);
    CHECK(max_abs(sys.stiffness - sys.stiffness.transpose()) <= 1e-12 * max_abs(sys.stiffness));
    CHECK(max_abs(sys.damping_matrix - sys.damping_matrix.transpose()) <=
          1e-12 * max_abs(sys.damping_matrix));
    Eigen::SelfAdjointEigenSolver<RealMatrix> em(sys.mass, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<RealMatrix> ek(sys.stiffness, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<RealMatrix> ed(sys.damping_matrix, Eigen::EigenvaluesOnly);
    CHECK(em.eigenvalues()(0) > 0.0);
    CHECK(ek.eigenvalues()(0) > 0.0);
    CHECK(ed.eigenvalues()(0) >= -1e-12 * ed.eigenvalues().maxCoeff());
  }
}

TEST_CASE("strain factors reproduce K and D") {
  Fixture f;
  const auto sys = assemble(f.part, f.a, build_mesh_for_state_size(f.part, 200));
  const RealMatrix gk(sys.stiffness_strain);
  const RealMatrix gd(sys.damping_strain);
  CHECK(max_abs(gk.transpose() * gk - sys.stiffness) <= 1e-11 * max_abs(sys.stiffness));
  CHECK(max_abs(gd.transpose() * gd - sys.damping_matrix) <= 1e-11 * max_abs(sys.damping_matrix));
}

TEST_CASE("nonconforming meshes are rejected") {
  Fixture f;
  auto mesh = build_mesh(f.part, 4, 4);
  mesh.plate_nodes.front() += 1e-3;
  CHECK_THROWS_AS(assemble(f.part, f.a, mesh), MeshError);
}

TEST_CASE("constraint map encodes the transmission constraints exactly") {
  Fixture f;
  const auto sys = assemble(f.part, f.a, build_mesh(f.part, 7, 5));
  const auto& c = sys.constraints;
  CHECK(c.plate.front() == c.interface_left());
  CHECK(c.plate[c.plate.size() - 2] == c.interface_right());
  CHECK(c.plate[1] == ConstraintMap::kFixed);
  CHECK(c.plate.back() == ConstraintMap::kFixed);
  CHECK(c.wave_left.front() == ConstraintMap::kFixed);
  CHECK(c.wave_right.back() == ConstraintMap::kFixed);
  CHECK(c.n_free == 2 * 7 + 2 * (5 - 1));

  // injective selection
  const RealMatrix s = c.matrix();
  Eigen::FullPivLU<RealMatrix> lu(s);
  CHECK(lu.rank() == c.n_free);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ComplexVector u = random_complex_vector(c.n_free, seed);
    for (double s_pt : {f.part.s_left, f.part.s_right}) {
      const auto plate = eval_plate(sys, u, s_pt);
      const auto wave = eval_wave(sys, u, s_pt, s_pt == f.part.s_right);
      CHECK(std::abs(plate.value - wave.value) <= 1e-14 * std::abs(plate.value));
      CHECK(std::abs(plate.d1) == 0.0);
    }
    CHECK(eval_wave(sys, u, 0.0).value == Complex(0.0));
    CHECK(eval_wave(sys, u, 1.0).value == Complex(0.0));
  }
}

TEST_CASE("dissipativity of the generator") {
  Fixture f;
  const auto sys = assemble(f.part, f.a, build_mesh_for_state_size(f.part, 200));
  const auto pencil = build_generator(sys);
  const auto sys0 = assemble(f.part, zero_damping(f.part), sys.mesh);
  const auto pencil0 = build_generator(sys0);
  const Index n = sys.n_free();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const RealVector x = random_real_vector(2 * n, seed);
    const double q = energy_inner(pencil, x, x);
    CHECK(energy_inner(pencil, apply_generator(pencil, x), x) <= 1e-12 * q);
    const double q0 = energy_inner(pencil0, x, x);
    CHECK(std::abs(energy_inner(pencil0, apply_generator(pencil0, x), x)) <= 1e-12 * q0);
  }
}

TEST_CASE("dissipation equals the damping form for velocities supported in the damping region") {
  Fixture f;
  const auto sys = assemble(f.part, f.a, build_mesh_for_state_size(f.part, 200));
  const auto pencil = build_generator(sys);
  const Index n = sys.n_free();
  const auto& pn = sys.mesh.plate_nodes;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RealVector x = random_real_vector(2 * n, seed);
    RealVector v = RealVector::Zero(n);
    const RealVector r = random_real_vector(n, seed + 1000);
    // plate DOFs of nodes inside the damping support
    for (std::size_t j = 0; j < pn.size(); ++j) {
      if (pn[j] > f.a.omega_left && pn[j] < f.a.omega_right) {
        for (int k = 0; k < 2; ++k) {
          const Index g = sys.constraints.plate[2 * j + static_cast<std::size_t>(k)];
          v(g) = r(g);
        }
      }
    }
    x.tail(n) = v;
    const double lhs = energy_inner(pencil, apply_generator(pencil, x), x);
    const double rhs = -v.dot(sys.damping_matrix * v);
    CHECK(rhs < 0.0);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
    // the same form by quadrature of the interpolated field
    CHECK(oracle::field_damping_form(sys, v) == doctest::Approx(-rhs).epsilon(1e-9));
  }
}

TEST_CASE("velocity block of the generator") {
  Fixture f;
  const auto sys = assemble(f.part, f.a, build_mesh_for_state_size(f.part, 120));
  const auto pencil = build_generator(sys);
  const Index n = sys.n_free();
  const RealVector x = random_real_vector(2 * n, 7);
  const RealVector y = apply_generator(pencil, x);
  CHECK((y.head(n) - x.tail(n)).norm() == 0.0);
  const RealVector residual =
      sys.mass * y.tail(n) + sys.stiffness * x.head(n) + sys.damping_matrix * x.tail(n);
  CHECK(residual.norm() <= 1e-10 * (sys.stiffness * x.head(n)).norm());
}

TEST_CASE("graph norm") {
  Fixture f;
  const auto sys = assemble(f.part, f.a, build_mesh_for_state_size(f.part, 120));
  const auto pencil = build_generator(sys);
  const Index n = sys.n_free();
  const RealVector x = random_real_vector(2 * n, 11);

  CHECK(graph_norm(pencil, x, 0) ==
        doctest::Approx(std::sqrt(energy_inner(pencil, x, x))).epsilon(1e-14));
  for (int k : {0, 1, 3}) {
    CHECK(graph_norm(pencil, RealVector::Zero(2 * n), k) == 0.0);
  }

  // brute force with an explicit inverse of E and a dense Gram
  const RealMatrix g = pencil.e.inverse() * pencil.a;
  RealMatrix q = RealMatrix::Zero(2 * n, 2 * n);
  q.topLeftCorner(n, n) = sys.stiffness;
  q.bottomRightCorner(n, n) = sys.mass;
  const RealVector gx = g * x;
  const double brute = std::sqrt(x.dot(q * x) + gx.dot(q * gx));
  CHECK(graph_norm(pencil, x, 1) == doctest::Approx(brute).epsilon(1e-9));
  CHECK_THROWS_AS(graph_norm(pencil, x, -1), std::invalid_argument);
}

TEST_CASE("field energy by quadrature matches the matrix energy") {
  Fixture f;
  const auto sys = assemble(f.part, f.a, build_mesh_for_state_size(f.part, 200));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    StateVector x{random_real_vector(sys.state_size(), seed), 0.0};
    CHECK(energy(sys, x) == doctest::Approx(oracle::field_energy(sys, x.coeffs)).epsilon(1e-11));
  }
}

TEST_CASE("load vector integrates the interpolated field") {
  Fixture f;
  const auto sys = assemble(f.part, f.a, build_mesh(f.part, 9, 6));
  auto fp = [](double x) { return Complex(std::cos(3.0 * x), x * x); };
  auto fw = [](double x) { return Complex(std::exp(x), 0.0); };
  const ComplexVector b = load_vector(sys, fp, fw, 8);
  const ComplexVector u = random_complex_vector(sys.n_free(), 3);
  // sum_i u_i b_i = int f u over both regions
  Complex direct(0.0);
  const auto& pn = sys.mesh.plate_nodes;
  for (std::size_t e = 0; e + 1 < pn.size(); ++e) {
    for (int part = 0; part < 2; ++part) {
      auto integrand = [&](double x) {
        const Complex v = fp(x) * eval_plate(sys, u, x).value;
        return part == 0 ? v.real() : v.imag();
      };
      direct += (part == 0 ? Complex(1, 0) : Complex(0, 1)) *
                oracle::integrate(integrand, pn[e], pn[e + 1], 8);
    }
  }
  for (const auto* nodes : {&sys.mesh.wave_left_nodes, &sys.mesh.wave_right_nodes}) {
    for (std::size_t e = 0; e + 1 < nodes->size(); ++e) {
      for (int part = 0; part < 2; ++part) {
        auto integrand = [&](double x) {
          const Complex v = fw(x) * eval_wave(sys, u, x).value;
          return part == 0 ? v.real() : v.imag();
        };
        direct += (part == 0 ? Complex(1, 0) : Complex(0, 1)) *
                  oracle::integrate(integrand, (*nodes)[e], (*nodes)[e + 1], 8);
      }
    }
  }
  CHECK(std::abs((u.transpose() * b).value() - direct) <= 1e-12 * std::abs(direct));
}

TEST_CASE("natural interface condition is recovered under refinement") {
  Fixture f;
  // (I - A) x = F with F the interpolant of a smooth profile
  std::vector<double> jumps;
  for (int n : {8, 16, 32, 64}) {
    const auto sys = assemble(f.part, f.a, build_mesh(f.part, n, n));
    const auto pencil = build_generator(sys);
    const RealVector rhs = seed_vector(sys, {SeedKind::Smooth, 1});
    const RealVector x = resolvent_smoothing(pencil, rhs, 1);
    const auto jump = interface_flux_jump(sys, ComplexVector(x.head(sys.n_free()).cast<Complex>()));
    jumps.push_back(std::max(std::abs(jump[0]), std::abs(jump[1])));
    MESSAGE("n=" << n << " flux jump " << jumps.back());
  }
  for (std::size_t i = 1; i < jumps.size(); ++i) {
    CHECK(jumps[i] < jumps[i - 1]);
  }
  // at least first order over three doublings
  CHECK(jumps.back() <= jumps.front() / 8.0);
}
