#include "platewave/spectral.hpp"

#include "platewave/resolvent.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

namespace platewave {
namespace {

struct QuadraticForms {
  double m = 0.0;
  double d = 0.0;
  double k = 0.0;
};

double hermitian_form(const RealMatrix& a, const ComplexVector& u) {
  const RealVector re = u.real();
  const RealVector im = u.imag();
  return re.dot(a * re) + im.dot(a * im);
}

// ||P(lambda) U|| / (||A||_F ||(U, V)||), the pencil residual of (U, V) when
// V = lambda U; otherwise the full block residual.
double block_residual(const GeneratorPencil& p, double a_norm, Complex lambda,
                      const ComplexVector& u, const ComplexVector& v) {
  const ComplexVector top = v - lambda * u;
  const ComplexVector ku = p.stiffness * u;
  const ComplexVector dv = p.damping_matrix * v;
  const ComplexVector mv = p.mass * v;
  const ComplexVector bottom = -ku - dv - lambda * mv;
  const double num = std::sqrt(top.squaredNorm() + bottom.squaredNorm());
  const double den = a_norm * std::sqrt(u.squaredNorm() + v.squaredNorm());
  return den > 0.0 ? num / den : num;
}

Complex refine(const QuadraticForms& q, Complex original) {
  const Complex root = std::sqrt(Complex(q.d * q.d - 4.0 * q.m * q.k, 0.0));
  const Complex l1 = (-q.d + root) / (2.0 * q.m);
  const Complex l2 = (-q.d - root) / (2.0 * q.m);
  return std::abs(l1 - original) <= std::abs(l2 - original) ? l1 : l2;
}

void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) {
    throw std::invalid_argument("resolvent_sweep: empty frequency grid");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw std::invalid_argument("resolvent_sweep: grid values must be positive and finite");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      std::ostringstream msg;
      msg << "resolvent_sweep: grid must be strictly increasing (index " << i << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

// Energy-norm data shared by every frequency of a sweep.
struct NormContext {
  BlockGram gram;
  bool dense = false;
  RealMatrix lk_t;      // L_K^T
  RealMatrix lm_t;      // L_M^T
  RealMatrix lk_inv_t;  // L_K^{-T}
  RealMatrix lm_inv_t;  // L_M^{-T}

  NormContext(const GeneratorPencil& pencil, bool with_dense)
      : gram(energy_gram(pencil)), dense(with_dense) {
    if (!dense) {
      return;
    }
    const Index n = pencil.n_free();
    const Eigen::LLT<RealMatrix> k(pencil.stiffness);
    const Eigen::LLT<RealMatrix> m(pencil.mass);
    lk_t = k.matrixU();
    lm_t = m.matrixU();
    lk_inv_t = k.matrixU().solve(RealMatrix::Identity(n, n));
    lm_inv_t = m.matrixU().solve(RealMatrix::Identity(n, n));
  }
};

bool use_dense(const GeneratorPencil& pencil, const ResolventNormOptions& o) {
  return o.method == NormMethod::Dense ||
         (o.method == NormMethod::Auto && pencil.state_size() <= o.dense_limit);
}

ResolventNormResult resolvent_norm_with(const GeneratorPencil& pencil, const NormContext& ctx,
                                        double mu, const ResolventNormOptions& options) {
  std::optional<ShiftedSolver> solver;
  try {
    solver.emplace(pencil, Complex(0.0, mu));
  } catch (const SingularMatrixError& e) {
    throw QuasiEigenvalueError(mu, e.rcond());
  }
  ResolventNormResult out;
  out.mu = mu;
  if (ctx.dense) {
    const Index n = pencil.n_free();
    ComplexMatrix f = ComplexMatrix::Zero(2 * n, 2 * n);
    f.topLeftCorner(n, n) = ctx.lk_inv_t.cast<Complex>();
    f.bottomRightCorner(n, n) = ctx.lm_inv_t.cast<Complex>();
    const ComplexMatrix x = solver->solve(f);
    ComplexMatrix c(2 * n, 2 * n);
    c.topRows(n) = ctx.lk_t * x.topRows(n);
    c.bottomRows(n) = ctx.lm_t * x.bottomRows(n);
    const Eigen::BDCSVD<ComplexMatrix> svd(c);
    out.norm = svd.singularValues()(0);
    out.method = NormMethod::Dense;
    return out;
  }
  OperatorNormOptions power = options;
  power.real_start = true;
  const OperatorNormResult r = operator_norm(solver->as_map(), ctx.gram, power);
  out.norm = r.value;
  out.iterations = r.iterations;
  out.relative_residual = r.relative_residual;
  out.method = NormMethod::Power;
  return out;
}

std::string quasi_message(double mu, double rcond) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "quasi-eigenvalue at mu = " << mu << " (shifted matrix rcond ~ " << rcond << ")";
  return msg.str();
}

}  // namespace

double default_mu_max(const Mesh& mesh) {
  return std::numbers::pi / (4.0 * mesh.max_element_size());
}

SpectrumReport compute_spectrum(const GeneratorPencil& pencil, double mu_max) {
  if (!(mu_max > 0.0)) {
    throw std::invalid_argument("compute_spectrum: mu_max must be positive");
  }
  const Index n = pencil.n_free();
  const Eigen::LLT<RealMatrix> lk(pencil.stiffness);
  const Eigen::LLT<RealMatrix>& lm = pencil.mass_factor;
  if (lk.info() != Eigen::Success) {
    throw AssemblyError("compute_spectrum: stiffness is not positive definite", RealVector());
  }
  const RealMatrix l_k = lk.matrixL();
  // B = L_K^T L_M^{-T}, C = L_M^{-1} D L_M^{-T}
  const RealMatrix b = lm.matrixL().solve(l_k).transpose();
  RealMatrix c = lm.matrixL().solve(pencil.damping_matrix);
  c = lm.matrixL().solve(RealMatrix(c.transpose())).transpose();
  c = 0.5 * (c + c.transpose());

  RealMatrix a_hat = RealMatrix::Zero(2 * n, 2 * n);
  a_hat.topRightCorner(n, n) = b;
  a_hat.bottomLeftCorner(n, n) = -b.transpose();
  a_hat.bottomRightCorner(n, n) = -c;

  EigenOptions opts;
  opts.enforce_residuals = false;
  std::vector<EigenPair> raw =
      generalized_eigs(a_hat, RealMatrix::Identity(2 * n, 2 * n), opts);

  const double a_norm = pencil.a.norm();
  SpectrumReport rep;
  rep.mu_max = mu_max;
  rep.pairs.reserve(raw.size());
  const ComplexMatrix lkt = l_k.transpose().cast<Complex>();
  const ComplexMatrix lmt = RealMatrix(lm.matrixU()).cast<Complex>();
  for (const EigenPair& p : raw) {
    const ComplexVector u = lkt.triangularView<Eigen::Upper>().solve(p.vector.head(n));
    const ComplexVector v = lmt.triangularView<Eigen::Upper>().solve(p.vector.tail(n));
    const double original_res = block_residual(pencil, a_norm, p.value, u, v);

    QuadraticForms q{hermitian_form(pencil.mass, u), hermitian_form(pencil.damping_matrix, u),
                     hermitian_form(pencil.stiffness, u)};
    EigenPair out;
    out.value = p.value;
    out.vector.resize(2 * n);
    out.vector << u, v;
    out.residual = original_res;
    if (q.m > 0.0) {
      const Complex lambda = refine(q, p.value);
      const ComplexVector v_ref = lambda * u;
      const double refined_res = block_residual(pencil, a_norm, lambda, u, v_ref);
      if (refined_res <= original_res) {
        out.value = lambda;
        out.vector << u, v_ref;
        out.residual = refined_res;
      }
    }
    const double nrm = out.vector.norm();
    if (nrm > 0.0) {
      out.vector /= nrm;
    }
    rep.pairs.push_back(std::move(out));
  }
  std::sort(rep.pairs.begin(), rep.pairs.end(), [](const EigenPair& x, const EigenPair& y) {
    if (x.value.imag() != y.value.imag()) {
      return x.value.imag() < y.value.imag();
    }
    return x.value.real() < y.value.real();
  });

  rep.spectral_abscissa = -std::numeric_limits<double>::infinity();
  rep.min_abs_re_in_band = std::numeric_limits<double>::infinity();
  rep.max_re_in_band = -std::numeric_limits<double>::infinity();
  for (const EigenPair& p : rep.pairs) {
    rep.spectral_abscissa = std::max(rep.spectral_abscissa, p.value.real());
    rep.max_residual = std::max(rep.max_residual, p.residual);
    if (std::abs(p.value.imag()) <= mu_max) {
      ++rep.count_in_band;
      rep.min_abs_re_in_band = std::min(rep.min_abs_re_in_band, std::abs(p.value.real()));
      rep.max_re_in_band = std::max(rep.max_re_in_band, p.value.real());
    }
  }
  rep.unstable = rep.spectral_abscissa > rep.tolerance;
  return rep;
}

QuasiEigenvalueError::QuasiEigenvalueError(double mu, double rcond)
    : std::runtime_error(quasi_message(mu, rcond)), mu_(mu), rcond_(rcond) {}

ResolventNormResult resolvent_norm(const GeneratorPencil& pencil, double mu,
                                   const ResolventNormOptions& options) {
  return resolvent_norm_with(pencil, NormContext(pencil, use_dense(pencil, options)), mu,
                             options);
}

ResolventSweep resolvent_sweep(const GeneratorPencil& pencil, const std::vector<double>& mu_grid,
                               const ResolventNormOptions& options, unsigned threads) {
  validate_grid(mu_grid);
  const NormContext ctx(pencil, use_dense(pencil, options));
  ResolventSweep sweep;
  sweep.points.resize(mu_grid.size());

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(mu_grid.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < mu_grid.size(); i = next++) {
      SweepPoint& pt = sweep.points[i];
      pt.mu = mu_grid[i];
      try {
        const ResolventNormResult r = resolvent_norm_with(pencil, ctx, pt.mu, options);
        pt.norm = r.norm;
        pt.log_norm = std::log(r.norm);
        pt.ok = std::isfinite(pt.log_norm) && r.norm > 0.0;
        if (!pt.ok) {
          pt.error = "non-finite norm";
        }
      } catch (const std::exception& e) {
        pt.ok = false;
        pt.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) {
    pool.emplace_back(work);
  }
  work();
  for (auto& t : pool) {
    t.join();
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  double running = -std::numeric_limits<double>::infinity();
  sweep.running_max.reserve(sweep.points.size());
  for (const SweepPoint& pt : sweep.points) {
    if (pt.ok) {
      ++m;
      sx += pt.mu;
      sy += pt.log_norm;
      sxx += pt.mu * pt.mu;
      sxy += pt.mu * pt.log_norm;
      running = std::max(running, pt.log_norm / pt.mu);
    } else {
      ++sweep.failures;
    }
    sweep.running_max.push_back(running);
  }
  sweep.empirical_c = running;
  const double mm = static_cast<double>(m);
  const double det = mm * sxx - sx * sx;
  if (m < 2 || !(std::abs(det) > 1e-12 * std::max(1.0, mm * sxx))) {
    sweep.degenerate_fit = true;
    sweep.c0 = m > 0 ? sy / mm : 0.0;
    sweep.c1 = 0.0;
  } else {
    sweep.c1 = (mm * sxy - sx * sy) / det;
    sweep.c0 = (sy - sweep.c1 * sx) / mm;
  }
  double ss = 0.0;
  for (const SweepPoint& pt : sweep.points) {
    if (pt.ok) {
      const double r = pt.log_norm - (sweep.c0 + sweep.c1 * pt.mu);
      ss += r * r;
    }
  }
  sweep.fit_rms = m > 0 ? std::sqrt(ss / mm) : 0.0;
  return sweep;
}

double running_max_growth(const ResolventSweep& sweep) {
  const auto& rm = sweep.running_max;
  if (rm.empty()) {
    return 0.0;
  }
  const std::size_t mid = (rm.size() - 1) / 2;
  const double base = rm[mid];
  const double last = rm.back();
  if (!std::isfinite(base) || !std::isfinite(last)) {
    return std::numeric_limits<double>::infinity();
  }
  const double scale = std::abs(base) > 0.0 ? std::abs(base) : 1.0;
  return (last - base) / scale;
}

DecayFitReport decay_fit(const std::vector<double>& times, const std::vector<double>& energy,
                         double x0_graph_norm, int k, double min_horizon) {
  if (times.size() != energy.size() || times.empty()) {
    throw std::invalid_argument("decay_fit: times and energy must be nonempty and equal length");
  }
  if (k < 0) {
    throw std::invalid_argument("decay_fit: order must be nonnegative");
  }
  if (!(x0_graph_norm > 0.0)) {
    throw std::invalid_argument("decay_fit: graph norm must be positive");
  }
  const double horizon = *std::max_element(times.begin(), times.end());
  if (horizon < min_horizon) {
    std::ostringstream msg;
    msg << "decay_fit: trajectory covers t <= " << horizon << ", need at least "
        << min_horizon;
    throw CoverageError(msg.str());
  }
  DecayFitReport rep;
  rep.k = k;
  rep.horizon = horizon;
  const double g2 = x0_graph_norm * x0_graph_norm;
  const double cut = horizon / 10.0;
  bool any = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < 0.0) {
      continue;
    }
    const double value = energy[i] * std::pow(std::log(2.0 + t), 2 * k) / g2;
    if (!any || value > rep.sup) {
      rep.sup = value;
      rep.argmax_time = t;
    }
    if (t <= cut) {
      rep.sup_before_final_decade = std::max(rep.sup_before_final_decade, value);
    }
    any = true;
  }
  if (rep.sup_before_final_decade > 0.0) {
    rep.final_decade_growth = rep.sup / rep.sup_before_final_decade - 1.0;
  } else {
    rep.final_decade_growth = rep.sup > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  rep.bounded = rep.final_decade_growth < 0.05;
  return rep;
}

DecayFitReport decay_fit(const Trajectory& traj, double x0_graph_norm, int k) {
  return decay_fit(traj.times, traj.energy, x0_graph_norm, k);
}

}  // namespace platewave
