#include <doctest.h>

#include "oracles.hpp"
#include "platewave/carleman.hpp"

#include <cmath>
#include <random>
#include <tuple>

using namespace platewave;

namespace {

PsiPiece linear_piece(double lo, double hi, double slope, double offset = 0.0) {
  PsiPiece p;
  p.lo = lo;
  p.hi = hi;
  p.psi.linear = Point2(0.0, slope);
  p.psi.offset = offset;
  return p;
}

// characteristic covector of |xi + i g|^2 - c: xi = rho tau, tau perpendicular to g
Point2 characteristic_xi(const WeightFunction& phi, const Point2& x, double c) {
  const Point2 g = phi.gradient(x);
  const Point2 tau = Point2(-g.y(), g.x()) / g.norm();
  return std::sqrt(g.squaredNorm() + c) * tau;
}

const ConditionResult& find(const VerificationReport& rep, const std::string& name) {
  for (const auto& c : rep.conditions) {
    if (c.name == name) {
      return c;
    }
  }
  FAIL("missing condition " << name);
  return rep.conditions.front();
}

}  // namespace

TEST_CASE("weight evaluators match finite differences") {
  PsiPiece p;
  p.lo = 0.0;
  p.hi = 1.0;
  p.psi.offset = 0.1;
  p.psi.linear = Point2(0.2, 0.3);
  p.psi.quad = Point2(0.5, -0.8);
  p.psi.center = Point2(0.2, 0.4);
  for (double lambda : {0.0, 1.5, 4.0}) {
    const WeightFunction phi({p}, lambda, 0.25);
    for (const Point2 x : {Point2(0.1, 0.2), Point2(0.7, 0.55), Point2(0.4, 0.9)}) {
      for (int j = 0; j < 2; ++j) {
        auto along = [&](double t) {
          Point2 y = x;
          y(j) = t;
          return y;
        };
        const double dv = oracle::derivative([&](double t) { return phi.value(along(t)); }, x(j), 1e-6);
        CHECK(phi.gradient(x)(j) == doctest::Approx(dv).epsilon(1e-6));
        for (int i = 0; i < 2; ++i) {
          const double dg =
              oracle::derivative([&](double t) { return phi.gradient(along(t))(i); }, x(j), 1e-6);
          CHECK(phi.hessian(x)(i, j) == doctest::Approx(dg).epsilon(1e-6).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("weight function construction") {
  CHECK_THROWS_AS(WeightFunction({}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightFunction({linear_piece(0, 1, 1)}, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightFunction({linear_piece(1, 0, 1)}, 1.0), std::invalid_argument);
  const WeightFunction phi({linear_piece(0.0, 0.5, 1.0)}, 2.0);
  CHECK(phi.covers(Point2(0.0, 0.25)));
  CHECK_FALSE(phi.covers(Point2(0.0, 0.75)));
  CHECK_THROWS_AS(phi.value(Point2(0.0, 0.75)), std::out_of_range);
  CHECK(phi.with_shift(1.0).value(Point2(0, 0.3)) == doctest::Approx(phi.value(Point2(0, 0.3)) + 1.0));
  CHECK(phi.with_lambda(0.0).value(Point2(0, 0.3)) == doctest::Approx(0.3));
}

TEST_CASE("conjugated symbol is the defining quadratic") {
  const WeightFunction phi({linear_piece(0.0, 1.0, 1.0)}, 3.0);
  const Point2 x(0.3, 0.4);
  const Point2 xi(0.7, -1.1);
  const Point2 g = phi.gradient(x);
  for (SymbolRegion r : {SymbolRegion::Plate, SymbolRegion::Wave}) {
    const ConjugatedSymbol sym{r, &phi};
    std::complex<double> direct(-sym.constant(), 0.0);
    for (int j = 0; j < 2; ++j) {
      const std::complex<double> s(xi(j), g(j));
      direct += s * s;
    }
    CHECK(std::abs(sym.value(x, xi) - direct) <= 1e-14 * std::abs(direct));
  }
}

TEST_CASE("bracket vanishes for a linear weight") {
  const WeightFunction phi({linear_piece(0.0, 1.0, 1.0)}, 0.0);
  const ConjugatedSymbol sym{SymbolRegion::Wave, &phi};
  for (double xn : {0.1, 0.5, 0.9}) {
    const Point2 x(0.5, xn);
    const Point2 xi = characteristic_xi(phi, x, 1.0);
    CHECK(std::abs(sym.value(x, xi)) <= 1e-14);
    CHECK(poisson_bracket(sym, x, xi) == 0.0);
  }
}

TEST_CASE("bracket of an exponentiated weight against finite differences") {
  const WeightFunction phi({linear_piece(0.0, 1.0, 1.0)}, 4.0);
  const ConjugatedSymbol sym{SymbolRegion::Wave, &phi};
  for (double xn : {0.05, 0.3, 0.6}) {
    const Point2 x(0.5, xn);
    const Point2 xi = characteristic_xi(phi, x, 1.0);
    const double fd = oracle::bracket_by_differences(phi, 1.0, x, xi, 1e-6);
    CHECK(poisson_bracket(sym, x, xi) == doctest::Approx(fd).epsilon(1e-5));
    CHECK(poisson_bracket(sym, x, xi) > 0.0);
    // {Im a, Re a} = -{Re a, Im a}
    CHECK(reversed_bracket(sym, x, xi) == -poisson_bracket(sym, x, xi));
  }
}

TEST_CASE("bracket against finite differences on random phase-space samples") {
  PsiPiece p;
  p.lo = -1.0;
  p.hi = 2.0;
  p.psi.linear = Point2(0.1, 0.3);
  p.psi.quad = Point2(0.5, 0.8);
  p.psi.center = Point2(0.2, 0.4);
  const WeightFunction phi({p}, 1.5);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::uniform_real_distribution<double> uxi(-3.0, 3.0);
  for (int s = 0; s < 1000; ++s) {
    const Point2 x(ux(rng), ux(rng));
    const Point2 xi(uxi(rng), uxi(rng));
    for (SymbolRegion r : {SymbolRegion::Plate, SymbolRegion::Wave}) {
      const ConjugatedSymbol sym{r, &phi};
      const double fd = oracle::bracket_by_differences(phi, sym.constant(), x, xi, 1e-5);
      const double b = poisson_bracket(sym, x, xi);
      REQUIRE(std::abs(b - fd) <= 1e-5 * std::abs(b));
    }
  }
}

TEST_CASE("sub-ellipticity: negative control, exponentiation, monotone margins") {
  const auto part = make_partition(0.1, 0.9);
  const auto w = shipped_weights(part);
  const WeightFunction lin(w.wave_psi, 0.0);
  const auto neg = check_subellipticity({SymbolRegion::Wave, &lin}, w.wave_region);
  CHECK(neg.verdict != Verdict::Pass);
  CHECK(neg.margin <= 0.0);

  const WeightFunction expd(w.wave_psi, 64.0);
  const auto pos = check_subellipticity({SymbolRegion::Wave, &expd}, w.wave_region, 1e-2, 1e-3);
  CHECK(pos.verdict == Verdict::Pass);
  CHECK(pos.margin >= 1e-3);
  CHECK(pos.characteristic_samples >= 10000);
  for (double delta : {0.0, 1e-4, 0.5 * pos.margin, pos.margin}) {
    CHECK(check_subellipticity({SymbolRegion::Wave, &expd}, w.wave_region, 1e-2, delta).verdict ==
          Verdict::Pass);
  }
  CHECK(check_subellipticity({SymbolRegion::Wave, &expd}, w.wave_region, 1e-2, 2.0 * pos.margin)
            .verdict == Verdict::Fail);

  RegionSampler empty = w.wave_region;
  empty.xn_intervals.clear();
  CHECK(check_subellipticity({SymbolRegion::Wave, &expd}, empty).verdict == Verdict::Vacuous);
  CHECK_THROWS_AS(check_subellipticity({SymbolRegion::Wave, nullptr}, w.wave_region),
                  std::invalid_argument);
}

TEST_CASE("gradient check") {
  const auto part = make_partition(0.1, 0.9);
  const auto w = shipped_weights(part);
  const WeightFunction plate(w.plate_psi, 64.0);
  CHECK(check_gradient(plate, w.plate_region).verdict == Verdict::Pass);
  // without the strip the critical point x_n = c is sampled
  RegionSampler all = w.plate_region;
  all.balls.clear();
  all.nx_n = 201;
  const auto r = check_gradient(plate, all);
  CHECK(r.verdict == Verdict::Fail);
  CHECK(r.witness_x.y() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exponentiation finds a finite lambda") {
  const auto part = make_partition(0.1, 0.9);
  const auto w = shipped_weights(part);
  const std::vector<double> grid{0, 1, 2, 4, 8, 16, 32, 64, 128, 256};
  const auto res = hormander_exponentiation(w.plate_psi, w.plate_region, w.wave_psi, w.wave_region, grid);
  MESSAGE("lambda* = " << res.lambda);
  CHECK(res.lambda > 0.0);
  CHECK(res.report.all_pass());
  CHECK(res.plate.lambda() == res.lambda);

  // regression fixture: twice the passing value still passes
  const auto twice = hormander_exponentiation(w.plate_psi, w.plate_region, w.wave_psi, w.wave_region,
                                              {2.0 * res.lambda});
  CHECK(twice.report.all_pass());

  const auto full = verify_weight_pair(res.plate, w.plate_region, res.wave, w.wave_region, part);
  CHECK(full.all_pass());
  CHECK(find(full, "subellipticity_plate").characteristic_samples >= 10000);
  CHECK(find(full, "subellipticity_wave").characteristic_samples >= 10000);

  // interface margin recomputed from finite differences of the weight values
  for (const auto& [label, s, nu] : {std::tuple{"s_left", part.s_left, -1.0},
                                     std::tuple{"s_right", part.s_right, 1.0}}) {
    // one-sided differences from inside each region
    const double h = 1e-7;
    const Point2 at(0.5, s);
    const double d1 = (res.plate.value(at) - res.plate.value(Point2(0.5, s - nu * h))) / h;
    const double d2 = (res.wave.value(Point2(0.5, s + nu * h)) - res.wave.value(at)) / h;
    const double margin = d1 * d1 - d2 * d2 - 1.0;
    const auto& c = find(full, std::string("jump@") + label);
    CHECK(c.margin == doctest::Approx(margin).epsilon(1e-4));
    CHECK(c.margin > 0.0);
  }
}

TEST_CASE("exponentiation failure for the linear control") {
  const auto part = make_partition(0.1, 0.9);
  const auto lc = linear_control(part);
  try {
    (void)hormander_exponentiation(lc.plate_psi, lc.plate_region, lc.wave_psi, lc.wave_region, {0.0});
    FAIL("expected ConstructionError");
  } catch (const ConstructionError& e) {
    CHECK(e.worst().verdict != Verdict::Pass);
  }
  CHECK_THROWS_AS(hormander_exponentiation(lc.plate_psi, lc.plate_region, lc.wave_psi, lc.wave_region, {}),
                  std::invalid_argument);

  const WeightFunction p(lc.plate_psi, 0.0);
  const WeightFunction q(lc.wave_psi, 0.0);
  const auto rep = verify_weight_pair(p, lc.plate_region, q, lc.wave_region, part);
  CHECK(rep.any_fail());
  const auto& jump = find(rep, "jump@s_left");
  CHECK(jump.verdict == Verdict::Fail);
  CHECK(jump.margin <= 0.0);
  CHECK(jump.witness_x.y() == part.s_left);
}

TEST_CASE("interface conditions on constructed pairs") {
  const auto part = make_partition(0.3, 0.7);
  // d_nu phi1 = -2 and d_nu phi2 = -1 at s_left, where nu = -1
  const WeightFunction phi1({linear_piece(0.3, 0.7, 2.0, -0.3)}, 0.0);
  const WeightFunction phi2({linear_piece(0.0, 0.3, 1.0), linear_piece(0.7, 1.0, -1.0, 1.0)}, 0.0);
  const auto rep = check_interface_conditions(phi1, phi2, part);
  CHECK(find(rep, "continuity@s_left").verdict == Verdict::Pass);
  CHECK(find(rep, "normal_sign_plate@s_left").verdict == Verdict::Pass);
  CHECK(find(rep, "normal_sign_wave@s_left").verdict == Verdict::Pass);
  const auto& jump = find(rep, "jump@s_left");
  CHECK(jump.verdict == Verdict::Pass);
  CHECK(jump.margin == doctest::Approx(4.0 - 1.0 - 1.0));

  // one smooth function restricted to both sides: equal slopes, jump -1
  const WeightFunction same1({linear_piece(0.3, 0.7, 1.0)}, 0.0);
  const WeightFunction same2({linear_piece(0.0, 1.0, 1.0)}, 0.0);
  const auto flat = check_interface_conditions(same1, same2, part);
  CHECK(find(flat, "jump@s_left").verdict == Verdict::Fail);
  CHECK(find(flat, "jump@s_left").margin == doctest::Approx(-1.0));

  // continuity gap 0.1
  const WeightFunction off({linear_piece(0.3, 0.7, 2.0, -0.2)}, 0.0);
  const auto gap = check_interface_conditions(off, phi2, part);
  const auto& cont = find(gap, "continuity@s_left");
  CHECK(cont.verdict == Verdict::Fail);
  CHECK(cont.margin == doctest::Approx(-0.1));
  CHECK(cont.witness_x.y() == 0.3);

  // boundary condition at Gamma: phi2 decreasing towards the outer boundary
  CHECK(find(rep, "boundary_sign_wave@outer_left").verdict == Verdict::Pass);
  CHECK(find(rep, "boundary_sign_wave@outer_right").verdict == Verdict::Pass);
}

TEST_CASE("phase pair ordering on critical balls") {
  PsiPiece p = linear_piece(0.0, 1.0, 1.0);
  PhasePair pair;
  pair.first = WeightFunction({p}, 1.0);
  pair.second = WeightFunction({p}, 1.0, 0.5);
  pair.first_balls = {CriticalBall{Point2(0.5, 0.3), 0.1, false}};
  pair.second_balls = {CriticalBall{Point2(0.5, 0.7), 0.1, false}};
  RegionSampler s;
  s.xn_intervals = {{0.0, 1.0}};
  s.nx_t = 21;
  s.nx_n = 101;
  const auto rep = check_phase_pair("1", pair, s);
  CHECK(find(rep, "gradient_1,1").verdict == Verdict::Pass);
  CHECK(find(rep, "ordering_1,2>1").verdict == Verdict::Pass);
  CHECK(find(rep, "ordering_1,2>1").margin == doctest::Approx(0.5));
  CHECK(find(rep, "ordering_1,1>2").verdict == Verdict::Fail);
}

TEST_CASE("critical balls") {
  const CriticalBall ball{Point2(0.5, 0.5), 0.1, false};
  CHECK(ball.contains(Point2(0.55, 0.55)));
  CHECK_FALSE(ball.contains(Point2(0.5, 0.61)));
  const CriticalBall strip{Point2(0.5, 0.5), 0.1, true};
  CHECK(strip.contains(Point2(100.0, 0.55)));
  CHECK_FALSE(strip.contains(Point2(0.5, 0.65)));
  CHECK_THROWS_AS(shipped_weights(make_partition(0.1, 0.9), 5.0, 0.5), std::invalid_argument);
}
