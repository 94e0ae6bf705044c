#include "platewave/carleman_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace platewave {
namespace {

struct Sample {
  double rho;
  double v2;
  double grad2;
  double op2;
};

}  // namespace

std::string to_string(ProbeOperator op) {
  switch (op) {
    case ProbeOperator::PlatePlus: return "plate+";
    case ProbeOperator::PlateMinus: return "plate-";
    default: return "wave";
  }
}

ProbeTable carleman_ratio_probe(const WeightFunction& phi, const WeightFunction& phi_ref,
                                const ProbeConfig& cfg, const std::vector<double>& h_grid) {
  if (h_grid.empty()) {
    throw std::invalid_argument("carleman_ratio_probe: empty h grid");
  }
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    if (!(h_grid[i] > 0.0) || (i > 0 && !(h_grid[i] < h_grid[i - 1]))) {
      throw std::invalid_argument("carleman_ratio_probe: h grid must be positive and decreasing");
    }
  }
  if (!(cfg.window_radius > 0.0) || !(cfg.grid_spacing > 0.0) || !(cfg.width_scale > 0.0)) {
    throw std::invalid_argument("carleman_ratio_probe: window, spacing and width must be positive");
  }
  const double big_r = cfg.window_radius;
  const Point2 x0 = cfg.center;
  for (double dy : {-big_r, big_r}) {
    const Point2 edge(x0.x(), x0.y() + dy);
    if (!phi.covers(edge) || !phi_ref.covers(edge)) {
      throw std::invalid_argument("carleman_ratio_probe: window leaves the weight's domain");
    }
  }
  const bool coherent = cfg.family == ProbeFamily::CoherentState;
  const double c = cfg.op == ProbeOperator::Wave ? 1.0 : 0.0;
  const Point2 g0 = phi_ref.gradient(x0);
  const double eta = std::sqrt(g0.squaredNorm() + c);
  const Point2 tau = g0.norm() > 0.0 ? Point2(-g0.y(), g0.x()) / g0.norm() : Point2(1.0, 0.0);
  const double ref0 = phi_ref.value(x0);

  const int n = static_cast<int>(std::ceil(2.0 * big_r / cfg.grid_spacing));
  const double dx = 2.0 * big_r / n;
  const double area = dx * dx;
  const double r2inv = 1.0 / (big_r * big_r);

  ProbeTable table;
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1));
  for (double h : h_grid) {
    samples.clear();
    const double sigma = coherent ? cfg.width_scale * std::sqrt(h) : cfg.width_scale;
    const double s2 = sigma * sigma;
    const Point2 k = coherent ? Point2(eta * tau / h) : Point2::Zero();
    double rho_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const Point2 x(x0.x() - big_r + i * dx, x0.y() - big_r + j * dx);
        const Point2 d = x - x0;
        const double r2 = d.squaredNorm();
        const double q = r2 * r2inv;
        if (q >= 1.0) {
          continue;
        }
        const double om = 1.0 - q;
        const Point2 dq = 2.0 * r2inv * d;
        const double chi = om * om * om * om;
        const Point2 dchi = -4.0 * om * om * om * dq;
        const double lchi = 12.0 * om * om * dq.squaredNorm() - 4.0 * om * om * om * (4.0 * r2inv);
        const double gs = std::exp(-0.5 * r2 / s2);
        const Point2 dg = -gs / s2 * d;
        const double lg = (r2 / (s2 * s2) - 2.0 / s2) * gs;

        const double env = cfg.amplitude * chi * gs;
        const Point2 denv = cfg.amplitude * (dchi * gs + chi * dg);
        const double lenv = cfg.amplitude * (lchi * gs + 2.0 * dchi.dot(dg) + chi * lg);

        const double theta = k.dot(d);
        const double co = std::cos(theta);
        const double si = std::sin(theta);
        const double v = env * co;
        const Point2 dv = denv * co - env * si * k;
        const double lv = lenv * co - 2.0 * denv.dot(k) * si - env * k.squaredNorm() * co;

        Point2 gpsi = Point2::Zero();
        double lpsi = 0.0;
        double psi = 0.0;
        if (coherent) {
          gpsi = phi_ref.gradient(x);
          lpsi = phi_ref.hessian(x).trace();
          psi = phi_ref.value(x) - ref0;
        }
        // e^{phi/h} grad w and e^{phi/h} Laplacian w, up to e^{rho/h}
        const Point2 gw = dv - v * gpsi / h;
        const double lw = lv - 2.0 * gpsi.dot(dv) / h - v * lpsi / h + gpsi.squaredNorm() * v / (h * h);
        double aw = 0.0;
        switch (cfg.op) {
          case ProbeOperator::Wave: aw = -lw - v / (h * h); break;
          case ProbeOperator::PlatePlus: aw = -lw + v / h; break;
          case ProbeOperator::PlateMinus: aw = -lw - v / h; break;
        }
        const double rho = phi.value(x) - psi;
        rho_max = std::max(rho_max, rho);
        samples.push_back({rho, v * v, gw.squaredNorm(), aw * aw});
      }
    }
    double sv = 0.0, sg = 0.0, sa = 0.0;
    for (const Sample& s : samples) {
      const double wgt = std::exp(2.0 * (s.rho - rho_max) / h) * area;
      sv += wgt * s.v2;
      sg += wgt * s.grad2;
      sa += wgt * s.op2;
    }
    ProbeRow row;
    row.h = h;
    row.lhs = h * sv + h * h * h * sg;
    row.rhs = h * h * h * h * sa;
    if (!(row.rhs > std::numeric_limits<double>::min()) || !std::isfinite(row.rhs) ||
        !std::isfinite(row.lhs)) {
      row.excluded = true;
      row.note = "rhs underflow";
      row.ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.ratio = row.lhs / row.rhs;
    }
    table.rows.push_back(row);
  }

  std::vector<double> kept;
  for (const auto& r : table.rows) {
    if (!r.excluded) {
      kept.push_back(r.ratio);
    }
  }
  if (kept.size() < 3) {
    table.verdict = Verdict::Vacuous;
    return table;
  }
  const auto tail_begin = kept.end() - 3;
  const double lo = *std::min_element(tail_begin, kept.end());
  const double hi = *std::max_element(tail_begin, kept.end());
  table.spread = hi / lo;
  table.verdict = table.spread <= cfg.ratio_factor ? Verdict::Pass : Verdict::Fail;
  return table;
}

}  // namespace platewave
