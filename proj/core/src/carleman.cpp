#include "platewave/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace platewave {
namespace {

Point2 perp(const Point2& v) { return Point2(-v.y(), v.x()); }

ConditionResult make_result(const std::string& name, bool pass, double margin,
                            const Point2& x) {
  ConditionResult r;
  r.name = name;
  r.verdict = pass ? Verdict::Pass : Verdict::Fail;
  r.margin = margin;
  r.witness_x = x;
  r.samples = 1;
  return r;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 1) {
    out.push_back(0.5 * (lo + hi));
    return out;
  }
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(lo + (hi - lo) * i / (n - 1));
  }
  return out;
}

}  // namespace

double QuadraticPsi::value(const Point2& x) const {
  const Point2 d = x - center;
  return offset + linear.dot(x) + quad.x() * d.x() * d.x() + quad.y() * d.y() * d.y();
}

Point2 QuadraticPsi::gradient(const Point2& x) const {
  const Point2 d = x - center;
  return linear + Point2(2.0 * quad.x() * d.x(), 2.0 * quad.y() * d.y());
}

Hessian2 QuadraticPsi::hessian() const {
  Hessian2 h = Hessian2::Zero();
  h(0, 0) = 2.0 * quad.x();
  h(1, 1) = 2.0 * quad.y();
  return h;
}

WeightFunction::WeightFunction(std::vector<PsiPiece> pieces, double lambda, double shift)
    : pieces_(std::move(pieces)), lambda_(lambda), shift_(shift) {
  if (pieces_.empty()) {
    throw std::invalid_argument("WeightFunction: need at least one psi piece");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("WeightFunction: lambda must be finite and nonnegative");
  }
  for (const auto& p : pieces_) {
    if (!(p.lo <= p.hi)) {
      throw std::invalid_argument("WeightFunction: piece interval is reversed");
    }
  }
}

WeightFunction WeightFunction::with_lambda(double lambda) const {
  return WeightFunction(pieces_, lambda, shift_);
}

WeightFunction WeightFunction::with_shift(double shift) const {
  return WeightFunction(pieces_, lambda_, shift);
}

bool WeightFunction::covers(const Point2& x) const {
  return std::any_of(pieces_.begin(), pieces_.end(),
                     [&](const PsiPiece& p) { return x.y() >= p.lo && x.y() <= p.hi; });
}

const PsiPiece& WeightFunction::piece(const Point2& x) const {
  for (const auto& p : pieces_) {
    if (x.y() >= p.lo && x.y() <= p.hi) {
      return p;
    }
  }
  std::ostringstream msg;
  msg << "WeightFunction: x_n = " << x.y() << " is outside every psi piece";
  throw std::out_of_range(msg.str());
}

double WeightFunction::psi(const Point2& x) const { return piece(x).psi.value(x); }

double WeightFunction::value(const Point2& x) const {
  const double p = psi(x);
  return (lambda_ > 0.0 ? std::exp(lambda_ * p) : p) + shift_;
}

Point2 WeightFunction::gradient(const Point2& x) const {
  const QuadraticPsi& q = piece(x).psi;
  const Point2 g = q.gradient(x);
  if (lambda_ == 0.0) {
    return g;
  }
  return lambda_ * std::exp(lambda_ * q.value(x)) * g;
}

Hessian2 WeightFunction::hessian(const Point2& x) const {
  const QuadraticPsi& q = piece(x).psi;
  if (lambda_ == 0.0) {
    return q.hessian();
  }
  const Point2 g = q.gradient(x);
  const double e = std::exp(lambda_ * q.value(x));
  return lambda_ * e * (lambda_ * g * g.transpose() + q.hessian());
}

double ConjugatedSymbol::re(const Point2& x, const Point2& xi) const {
  const Point2 g = phi->gradient(x);
  return xi.squaredNorm() - g.squaredNorm() - constant();
}

double ConjugatedSymbol::im(const Point2& x, const Point2& xi) const {
  return 2.0 * xi.dot(phi->gradient(x));
}

std::complex<double> ConjugatedSymbol::value(const Point2& x, const Point2& xi) const {
  return {re(x, xi), im(x, xi)};
}

double poisson_bracket(const ConjugatedSymbol& sym, const Point2& x, const Point2& xi) {
  const Point2 g = sym.phi->gradient(x);
  const Hessian2 h = sym.phi->hessian(x);
  return 4.0 * xi.dot(h * xi) + 4.0 * g.dot(h * g);
}

double reversed_bracket(const ConjugatedSymbol& sym, const Point2& x, const Point2& xi) {
  return -poisson_bracket(sym, x, xi);
}

double symbol_scale(const ConjugatedSymbol& sym, const Point2& x, const Point2& xi) {
  return xi.squaredNorm() + sym.phi->gradient(x).squaredNorm() + 1.0;
}

bool CriticalBall::contains(const Point2& x) const {
  if (strip) {
    return std::abs(x.y() - center.y()) < radius;
  }
  return (x - center).norm() < radius;
}

std::vector<Point2> RegionSampler::points() const {
  std::vector<Point2> out;
  const auto ts = linspace(xt_lo, xt_hi, nx_t);
  for (const auto& [lo, hi] : xn_intervals) {
    for (double xn : linspace(lo, hi, nx_n)) {
      for (double xt : ts) {
        const Point2 x(xt, xn);
        if (std::none_of(balls.begin(), balls.end(),
                         [&](const CriticalBall& b) { return b.contains(x); })) {
          out.push_back(x);
        }
      }
    }
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    default: return "VACUOUS";
  }
}

bool VerificationReport::all_pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionResult& c) { return c.verdict == Verdict::Pass; });
}

bool VerificationReport::any_fail() const {
  return std::any_of(conditions.begin(), conditions.end(),
                     [](const ConditionResult& c) { return c.verdict == Verdict::Fail; });
}

void VerificationReport::append(const VerificationReport& other) {
  conditions.insert(conditions.end(), other.conditions.begin(), other.conditions.end());
}

ConditionResult check_subellipticity(const ConjugatedSymbol& sym, const RegionSampler& sampler,
                                     double epsilon, double delta) {
  if (sym.phi == nullptr) {
    throw std::invalid_argument("check_subellipticity: symbol has no weight");
  }
  ConditionResult res;
  res.name = sym.region == SymbolRegion::Plate ? "subellipticity_plate" : "subellipticity_wave";
  res.margin = std::numeric_limits<double>::infinity();
  const double pi = std::numbers::pi;

  auto visit = [&](const Point2& x, const Point2& xi) {
    ++res.samples;
    const double s = symbol_scale(sym, x, xi);
    if (std::abs(sym.value(x, xi)) > epsilon * s) {
      return;
    }
    ++res.characteristic_samples;
    const double m = poisson_bracket(sym, x, xi) / std::pow(s, 1.5);
    if (m < res.margin) {
      res.margin = m;
      res.witness_x = x;
      res.witness_xi = xi;
    }
  };

  const auto alphas = linspace(-0.25 * epsilon, 0.25 * epsilon, sampler.n_char_perturb);
  for (const Point2& x : sampler.points()) {
    const Point2 g = sym.phi->gradient(x);
    const double radius = std::sqrt(g.squaredNorm() + 2.0);
    for (int i = 1; i <= sampler.n_radial; ++i) {
      const double r = radius * i / sampler.n_radial;
      for (int j = 0; j < sampler.n_angular; ++j) {
        const double th = 2.0 * pi * j / sampler.n_angular;
        visit(x, Point2(r * std::cos(th), r * std::sin(th)));
      }
    }
    const double gn = g.norm();
    if (gn == 0.0) {
      continue;
    }
    const Point2 tau = perp(g) / gn;
    const Point2 nhat = g / gn;
    const double rho = std::sqrt(g.squaredNorm() + sym.constant());
    for (double sign : {1.0, -1.0}) {
      for (double a : alphas) {
        for (double b : alphas) {
          visit(x, sign * rho * (1.0 + a) * tau + rho * b * nhat);
        }
      }
    }
  }
  if (res.characteristic_samples == 0) {
    res.verdict = Verdict::Vacuous;
    res.margin = 0.0;
  } else {
    res.verdict = res.margin >= delta ? Verdict::Pass : Verdict::Fail;
  }
  return res;
}

ConditionResult check_gradient(const WeightFunction& phi, const RegionSampler& sampler,
                               double tolerance) {
  ConditionResult res;
  res.name = "gradient_nonvanishing";
  double gmin = std::numeric_limits<double>::infinity();
  double gmax = 0.0;
  for (const Point2& x : sampler.points()) {
    ++res.samples;
    // grad phi = lambda e^{lambda psi} grad psi; divide out the positive
    // factor so the margin does not underflow at large lambda
    const double scale =
        phi.lambda() > 0.0 ? phi.lambda() * std::exp(phi.lambda() * phi.psi(x)) : 1.0;
    const double g = phi.gradient(x).norm() / scale;
    gmax = std::max(gmax, g);
    if (g < gmin) {
      gmin = g;
      res.witness_x = x;
    }
  }
  if (res.samples == 0) {
    res.verdict = Verdict::Vacuous;
    return res;
  }
  res.margin = gmax > 0.0 ? gmin / gmax : 0.0;
  res.verdict = gmin > tolerance * std::max(1.0, gmax) ? Verdict::Pass : Verdict::Fail;
  return res;
}

VerificationReport check_interface_conditions(const WeightFunction& phi1,
                                              const WeightFunction& phi2,
                                              const DomainPartition& part,
                                              const std::vector<CriticalBall>& plate_balls,
                                              double xt, double continuity_tolerance) {
  VerificationReport rep;
  const std::pair<const char*, double> interfaces[] = {{"s_left", part.s_left},
                                                       {"s_right", part.s_right}};
  for (const auto& [label, s] : interfaces) {
    const Point2 x(xt, s);
    const double nu = s == part.s_left ? DomainPartition::plate_normal(InterfaceSide::Left)
                                       : DomainPartition::plate_normal(InterfaceSide::Right);
    const double v1 = phi1.value(x);
    const double v2 = phi2.value(x);
    const double d1 = nu * phi1.gradient(x).y();
    const double d2 = nu * phi2.gradient(x).y();
    const std::string at = std::string("@") + label;
    const double gap = std::abs(v1 - v2);
    rep.conditions.push_back(make_result(
        "continuity" + at, gap <= continuity_tolerance * std::max({1.0, std::abs(v1), std::abs(v2)}),
        -gap, x));
    rep.conditions.push_back(make_result("normal_sign_plate" + at, d1 < 0.0, -d1, x));
    rep.conditions.push_back(make_result("normal_sign_wave" + at, d2 < 0.0, -d2, x));
    const double jump = d1 * d1 - d2 * d2 - 1.0;
    rep.conditions.push_back(make_result("jump" + at, jump > 0.0, jump, x));
  }
  const std::pair<const char*, double> boundary[] = {{"outer_left", part.outer_left},
                                                     {"outer_right", part.outer_right}};
  for (const auto& [label, g] : boundary) {
    const Point2 x(xt, g);
    const double nu = g == part.outer_left ? -1.0 : 1.0;
    const double d2 = nu * phi2.gradient(x).y();
    rep.conditions.push_back(
        make_result(std::string("boundary_sign_wave@") + label, d2 < 0.0, -d2, x));
  }
  for (std::size_t i = 0; i < plate_balls.size(); ++i) {
    const CriticalBall& b = plate_balls[i];
    std::vector<std::pair<Point2, Point2>> probes;  // boundary point, outward normal of O1
    if (b.strip) {
      probes.push_back({Point2(xt, b.center.y() - b.radius), Point2(0.0, 1.0)});
      probes.push_back({Point2(xt, b.center.y() + b.radius), Point2(0.0, -1.0)});
    } else {
      for (int k = 0; k < 16; ++k) {
        const double th = 2.0 * std::numbers::pi * k / 16;
        const Point2 n(std::cos(th), std::sin(th));
        probes.push_back({b.center + b.radius * n, -n});
      }
    }
    double worst = std::numeric_limits<double>::infinity();
    Point2 wx = probes.front().first;
    for (const auto& [x, n] : probes) {
      const double d = std::abs(n.dot(phi1.gradient(x)));
      if (d < worst) {
        worst = d;
        wx = x;
      }
    }
    rep.conditions.push_back(
        make_result("ball_normal_plate#" + std::to_string(i), worst > 0.0, worst, wx));
  }
  return rep;
}

ConstructionError::ConstructionError(const std::string& what, ConditionResult worst)
    : std::runtime_error(what), worst_(std::move(worst)) {}

VerificationReport verify_weight_pair(const WeightFunction& plate, const RegionSampler& plate_region,
                                      const WeightFunction& wave, const RegionSampler& wave_region,
                                      const DomainPartition& part, double epsilon, double delta) {
  VerificationReport rep;
  rep.epsilon = epsilon;
  rep.delta = delta;
  ConditionResult gp = check_gradient(plate, plate_region);
  gp.name += "_plate";
  ConditionResult gw = check_gradient(wave, wave_region);
  gw.name += "_wave";
  rep.conditions.push_back(gp);
  rep.conditions.push_back(gw);
  rep.append(check_interface_conditions(plate, wave, part, plate_region.balls));
  rep.conditions.push_back(check_subellipticity({SymbolRegion::Plate, &plate}, plate_region,
                                                epsilon, delta));
  rep.conditions.push_back(
      check_subellipticity({SymbolRegion::Wave, &wave}, wave_region, epsilon, delta));
  return rep;
}

ExponentiationResult hormander_exponentiation(const std::vector<PsiPiece>& plate_psi,
                                              const RegionSampler& plate_region,
                                              const std::vector<PsiPiece>& wave_psi,
                                              const RegionSampler& wave_region,
                                              std::vector<double> lambda_grid, double epsilon,
                                              double delta) {
  if (lambda_grid.empty()) {
    throw std::invalid_argument("hormander_exponentiation: empty lambda grid");
  }
  std::sort(lambda_grid.begin(), lambda_grid.end());
  ConditionResult worst;
  worst.name = "none";
  for (double lambda : lambda_grid) {
    ExponentiationResult out;
    out.lambda = lambda;
    out.plate = WeightFunction(plate_psi, lambda);
    out.wave = WeightFunction(wave_psi, lambda);
    out.report.epsilon = epsilon;
    out.report.delta = delta;
    ConditionResult gp = check_gradient(out.plate, plate_region);
    gp.name += "_plate";
    ConditionResult gw = check_gradient(out.wave, wave_region);
    gw.name += "_wave";
    out.report.conditions = {
        gp, gw,
        check_subellipticity({SymbolRegion::Plate, &out.plate}, plate_region, epsilon, delta),
        check_subellipticity({SymbolRegion::Wave, &out.wave}, wave_region, epsilon, delta)};
    if (out.report.all_pass()) {
      return out;
    }
    bool first = true;
    for (const auto& c : out.report.conditions) {
      if (c.verdict != Verdict::Pass && (first || c.margin < worst.margin)) {
        worst = c;
        first = false;
      }
    }
  }
  std::ostringstream msg;
  msg << "hormander_exponentiation: no lambda in the grid passes (worst: " << worst.name
      << ", margin " << worst.margin << ")";
  throw ConstructionError(msg.str(), worst);
}

VerificationReport check_phase_pair(const std::string& label, const PhasePair& pair,
                                    const RegionSampler& sampler) {
  RegionSampler all = sampler;
  all.balls.clear();
  const std::vector<Point2> pts = all.points();
  VerificationReport rep;

  auto inside = [](const std::vector<CriticalBall>& balls, const Point2& x) {
    return std::any_of(balls.begin(), balls.end(),
                       [&](const CriticalBall& b) { return b.contains(x); });
  };
  auto gradient_outside = [&](const WeightFunction& phi, const std::vector<CriticalBall>& balls,
                              const std::string& name) {
    RegionSampler s = all;
    s.balls = balls;
    ConditionResult r = check_gradient(phi, s);
    r.name = name;
    rep.conditions.push_back(r);
  };
  auto ordering = [&](const WeightFunction& hi, const WeightFunction& lo,
                      const std::vector<CriticalBall>& balls, const std::string& name) {
    ConditionResult r;
    r.name = name;
    r.margin = std::numeric_limits<double>::infinity();
    for (const Point2& x : pts) {
      if (!inside(balls, x)) {
        continue;
      }
      ++r.samples;
      const double m = hi.value(x) - lo.value(x);
      if (m < r.margin) {
        r.margin = m;
        r.witness_x = x;
      }
    }
    if (r.samples == 0) {
      r.verdict = Verdict::Vacuous;
      r.margin = 0.0;
    } else {
      r.verdict = r.margin > 0.0 ? Verdict::Pass : Verdict::Fail;
    }
    rep.conditions.push_back(r);
  };
  gradient_outside(pair.first, pair.first_balls, "gradient_" + label + ",1");
  gradient_outside(pair.second, pair.second_balls, "gradient_" + label + ",2");
  ordering(pair.second, pair.first, pair.first_balls, "ordering_" + label + ",2>1");
  ordering(pair.first, pair.second, pair.second_balls, "ordering_" + label + ",1>2");
  return rep;
}

ShippedWeights shipped_weights(const DomainPartition& part, double kappa, double radius) {
  ShippedWeights w;
  const double c = 0.5 * (part.s_left + part.s_right);
  const double half = 0.5 * part.plate_length();
  if (!(radius > 0.0 && radius < half)) {
    throw std::invalid_argument("shipped_weights: strip radius must lie inside the plate");
  }
  PsiPiece plate;
  plate.lo = part.s_left;
  plate.hi = part.s_right;
  plate.psi.offset = part.s_left + kappa * half * half;
  plate.psi.quad = Point2(0.0, -kappa);
  plate.psi.center = Point2(0.0, c);
  w.plate_psi = {plate};

  PsiPiece left;
  left.lo = part.outer_left;
  left.hi = part.s_left;
  left.psi.linear = Point2(0.0, 1.0);
  PsiPiece right;
  right.lo = part.s_right;
  right.hi = part.outer_right;
  right.psi.offset = part.s_left + part.s_right;
  right.psi.linear = Point2(0.0, -1.0);
  w.wave_psi = {left, right};

  w.strip.center = Point2(0.5, c);
  w.strip.radius = radius;
  w.strip.strip = true;
  w.plate_region.xn_intervals = {{part.s_left, part.s_right}};
  w.plate_region.balls = {w.strip};
  w.wave_region.xn_intervals = {{part.outer_left, part.s_left}, {part.s_right, part.outer_right}};
  return w;
}

ShippedWeights linear_control(const DomainPartition& part) {
  ShippedWeights w;
  PsiPiece plate;
  plate.lo = part.s_left;
  plate.hi = part.s_right;
  plate.psi.linear = Point2(0.0, 1.0);
  PsiPiece wave;
  wave.lo = part.outer_left;
  wave.hi = part.outer_right;
  wave.psi.linear = Point2(0.0, 1.0);
  w.plate_psi = {plate};
  w.wave_psi = {wave};
  w.plate_region.xn_intervals = {{part.s_left, part.s_right}};
  w.wave_region.xn_intervals = {{part.outer_left, part.s_left}, {part.s_right, part.outer_right}};
  return w;
}

}  // namespace platewave
