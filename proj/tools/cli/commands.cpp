#include "commands.hpp"

#include "platewave/assembly.hpp"
#include "platewave/carleman.hpp"
#include "platewave/carleman_probe.hpp"
#include "platewave/geometry.hpp"
#include "platewave/io.hpp"
#include "platewave/semigroup.hpp"
#include "platewave/spectral.hpp"
#include "platewave/splitting.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace platewave::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Problem {
  DomainPartition part;
  DampingProfile damping;
  Mesh mesh;
};

Problem make_problem(const RunConfig& cfg) {
  Problem p;
  p.part = make_partition(cfg.geometry.s_left_len, cfg.geometry.s_right_len);
  const auto& d = cfg.damping;
  p.damping = d.amplitude_time > 0.0
                  ? make_damping(p.part, d.omega_left_len, d.omega_right_len, d.amplitude_time,
                                 d.margin_len)
                  : zero_damping(p.part);
  p.mesh = cfg.mesh.n_plate > 0 ? build_mesh(p.part, cfg.mesh.n_plate, cfg.mesh.n_wave)
                                : build_mesh_for_state_size(p.part, cfg.mesh.state_dofs);
  return p;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

json point(const Point2& x) { return json::array({number(x.x()), number(x.y())}); }

json condition_json(const ConditionResult& c) {
  return {{"name", c.name},
          {"verdict", to_string(c.verdict)},
          {"margin", number(c.margin)},
          {"witness_x", point(c.witness_x)},
          {"witness_xi", point(c.witness_xi)},
          {"samples", c.samples},
          {"characteristic_samples", c.characteristic_samples}};
}

class Output {
 public:
  Output(fs::path dir, RunOutcome& outcome) : dir_(std::move(dir)), outcome_(outcome) {
    fs::create_directories(dir_);
  }

  std::ofstream open(const std::string& name) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) {
      throw std::runtime_error("cannot write " + (dir_ / name).string());
    }
    outcome_.files.push_back(name);
    return os;
  }

  void json_file(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }

 private:
  fs::path dir_;
  RunOutcome& outcome_;
};

double default_dt(const RunConfig& cfg, const Mesh& mesh) {
  return cfg.time.dt_time > 0.0 ? cfg.time.dt_time : mesh.min_element_size();
}

SeedDescriptor seed_of(const RunConfig& cfg) {
  return {cfg.time.seed_kind == SeedKindConfig::Smooth ? SeedKind::Smooth : SeedKind::Random,
          cfg.seed};
}

json run_simulate(const RunConfig& cfg, const Problem& p, Output& out) {
  const DiscreteSystem sys = assemble(p.part, p.damping, p.mesh);
  const GeneratorPencil pencil = build_generator(sys);
  const InitialData init = prepare_initial_data(sys, pencil, seed_of(cfg), cfg.time.k);
  const double dt = default_dt(cfg, p.mesh);
  const Trajectory traj = simulate(pencil, init.state, dt, cfg.time.n_steps);

  const double e0 = traj.energy.front();
  double max_res = 0.0;
  {
    auto os = out.open("energy.csv");
    io::CsvWriter csv(os, {"step", "time", "energy", "dissipation_increment",
                           "cumulative_dissipation", "identity_residual"});
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const double res =
          i == 0 ? 0.0 : traj.energy[i] - traj.energy[i - 1] + traj.dissipation_increment[i];
      max_res = std::max(max_res, std::abs(res));
      if (i % static_cast<std::size_t>(cfg.time.snapshot_stride) == 0 || i + 1 == traj.size()) {
        csv.row({static_cast<double>(i), traj.times[i], traj.energy[i],
                 traj.dissipation_increment[i], traj.cumulative_dissipation[i], res});
      }
    }
  }
  const double cumulative =
      traj.energy.back() - e0 + traj.cumulative_dissipation.back();
  const bool monotone = traj.is_monotone();
  const bool identity = max_res <= 1e-10 * e0;
  return {{"dt", dt},
          {"n_steps", cfg.time.n_steps},
          {"state_size", sys.state_size()},
          {"k", cfg.time.k},
          {"graph_norm", number(init.graph_norm)},
          {"energy_initial", number(e0)},
          {"energy_final", number(traj.energy.back())},
          {"relative_drift", number((traj.energy.back() - e0) / e0)},
          {"max_step_identity_residual_rel", number(max_res / e0)},
          {"cumulative_identity_residual_rel", number(cumulative / e0)},
          {"verdicts",
           {{"energy_monotone", verdict(monotone)}, {"dissipation_identity", verdict(identity)}}}};
}

json run_spectrum(const RunConfig& cfg, const Problem& p, Output& out) {
  const DiscreteSystem sys = assemble(p.part, p.damping, p.mesh);
  const GeneratorPencil pencil = build_generator(sys);
  const double mu_max =
      cfg.spectral.mu_max_freq > 0.0 ? cfg.spectral.mu_max_freq : default_mu_max(p.mesh);
  const SpectrumReport rep = compute_spectrum(pencil, mu_max);
  double max_abs_re_in_band = 0.0;
  {
    auto os = out.open("eigenvalues.csv");
    io::CsvWriter csv(os, {"re", "im", "residual", "in_band"});
    for (const auto& e : rep.pairs) {
      const bool in_band = std::abs(e.value.imag()) <= mu_max;
      if (in_band) {
        max_abs_re_in_band = std::max(max_abs_re_in_band, std::abs(e.value.real()));
      }
      csv.row({e.value.real(), e.value.imag(), e.residual, in_band ? 1.0 : 0.0});
    }
  }
  json verdicts = {{"dissipative", verdict(!rep.unstable)}};
  if (p.damping.is_zero()) {
    verdicts["imaginary_axis"] = verdict(max_abs_re_in_band <= 1e-8);
  } else {
    verdicts["no_imaginary_eigenvalue"] = verdict(rep.max_re_in_band < -1e-10);
  }
  return {{"state_size", sys.state_size()},
          {"eigenvalue_count", rep.pairs.size()},
          {"spectral_abscissa", number(rep.spectral_abscissa)},
          {"mu_max", number(rep.mu_max)},
          {"count_in_band", rep.count_in_band},
          {"max_re_in_band", number(rep.max_re_in_band)},
          {"min_abs_re_in_band", number(rep.min_abs_re_in_band)},
          {"max_abs_re_in_band", number(max_abs_re_in_band)},
          {"max_residual", number(rep.max_residual)},
          {"verdicts", verdicts}};
}

std::vector<double> sweep_grid(const SpectralConfig& s) {
  std::vector<double> grid(static_cast<std::size_t>(s.sweep_points));
  for (int i = 0; i < s.sweep_points; ++i) {
    const double t = static_cast<double>(i) / (s.sweep_points - 1);
    grid[static_cast<std::size_t>(i)] =
        s.sweep_spacing == GridSpacing::Linear
            ? s.sweep_mu_min_freq + t * (s.sweep_mu_max_freq - s.sweep_mu_min_freq)
            : s.sweep_mu_min_freq * std::pow(s.sweep_mu_max_freq / s.sweep_mu_min_freq, t);
  }
  grid.back() = s.sweep_mu_max_freq;
  return grid;
}

json run_sweep(const RunConfig& cfg, const Problem& p, Output& out) {
  const DiscreteSystem sys = assemble(p.part, p.damping, p.mesh);
  const GeneratorPencil pencil = build_generator(sys);
  ResolventNormOptions opts;
  opts.relative_tolerance = cfg.spectral.norm_tolerance;
  opts.seed = cfg.seed;
  opts.real_start = true;
  const ResolventSweep sw = resolvent_sweep(pencil, sweep_grid(cfg.spectral), opts,
                                            static_cast<unsigned>(cfg.spectral.threads));
  {
    auto os = out.open("sweep.csv");
    io::CsvWriter csv(os, {"mu", "ok", "norm", "log_norm", "log_norm_over_mu", "running_max"});
    for (std::size_t i = 0; i < sw.points.size(); ++i) {
      const auto& pt = sw.points[i];
      csv.row({pt.mu, pt.ok ? 1.0 : 0.0, pt.norm, pt.log_norm, pt.log_norm / pt.mu,
               sw.running_max[i]});
    }
  }
  json errors = json::array();
  for (const auto& pt : sw.points) {
    if (!pt.ok) {
      errors.push_back({{"mu", pt.mu}, {"error", pt.error}});
    }
  }
  const double growth = running_max_growth(sw);
  return {{"state_size", sys.state_size()},
          {"points", sw.points.size()},
          {"failures", sw.failures},
          {"errors", errors},
          {"fit", {{"c0", number(sw.c0)}, {"c1", number(sw.c1)}, {"rms", number(sw.fit_rms)},
                   {"degenerate", sw.degenerate_fit}}},
          {"empirical_c", number(sw.empirical_c)},
          {"running_max_growth", number(growth)},
          {"verdicts",
           {{"finite", verdict(sw.failures == 0)},
            {"running_max_stable", verdict(std::isfinite(growth) && growth < 0.1)}}}};
}

json run_decay(const RunConfig& cfg, const Problem& p, Output& out) {
  const DiscreteSystem sys = assemble(p.part, p.damping, p.mesh);
  const GeneratorPencil pencil = build_generator(sys);
  const InitialData init = prepare_initial_data(sys, pencil, seed_of(cfg), cfg.time.k);
  const double dt = default_dt(cfg, p.mesh);
  const Trajectory traj = simulate(pencil, init.state, dt, cfg.time.n_steps);
  const DecayFitReport fit = decay_fit(traj, init.graph_norm, cfg.time.k);
  {
    auto os = out.open("decay.csv");
    io::CsvWriter csv(os, {"time", "energy", "normalized"});
    const double g2 = init.graph_norm * init.graph_norm;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (i % static_cast<std::size_t>(cfg.time.snapshot_stride) == 0 || i + 1 == traj.size()) {
        const double l = std::log(2.0 + traj.times[i]);
        csv.row({traj.times[i], traj.energy[i],
                 traj.energy[i] * std::pow(l, 2.0 * cfg.time.k) / g2});
      }
    }
  }
  const bool monotone = traj.is_monotone();
  return {{"dt", dt},
          {"horizon", number(fit.horizon)},
          {"k", fit.k},
          {"graph_norm", number(init.graph_norm)},
          {"sup", number(fit.sup)},
          {"argmax_time", number(fit.argmax_time)},
          {"sup_before_final_decade", number(fit.sup_before_final_decade)},
          {"final_decade_growth", number(fit.final_decade_growth)},
          {"bounded", fit.bounded},
          {"verdicts",
           {{"decay_bounded", verdict(fit.bounded)}, {"energy_monotone", verdict(monotone)}}}};
}

ShippedWeights weights_of(const RunConfig& cfg, const DomainPartition& part) {
  ShippedWeights w = cfg.carleman.psi == PsiChoice::Shipped
                         ? shipped_weights(part, cfg.carleman.kappa, cfg.carleman.strip_radius_len)
                         : linear_control(part);
  if (!cfg.carleman.balls.empty()) {
    w.plate_region.balls.clear();
    for (const auto& b : cfg.carleman.balls) {
      w.plate_region.balls.push_back({Point2(0.5, b.center_len), b.radius_len, true});
    }
  }
  return w;
}

json run_verify(const RunConfig& cfg, const Problem& p, Output&) {
  const auto& c = cfg.carleman;
  const ShippedWeights w = weights_of(cfg, p.part);
  json j;
  VerificationReport rep;
  double lambda = 0.0;
  try {
    const ExponentiationResult res = hormander_exponentiation(
        w.plate_psi, w.plate_region, w.wave_psi, w.wave_region, c.lambda_grid, c.epsilon,
        c.delta);
    lambda = res.lambda;
    j["construction"] = {{"verdict", "PASS"}, {"lambda", lambda}};
  } catch (const ConstructionError& e) {
    lambda = *std::max_element(c.lambda_grid.begin(), c.lambda_grid.end());
    j["construction"] = {{"verdict", "FAIL"},
                         {"message", e.what()},
                         {"worst", condition_json(e.worst())}};
  }
  rep = verify_weight_pair(WeightFunction(w.plate_psi, lambda), w.plate_region,
                           WeightFunction(w.wave_psi, lambda), w.wave_region, p.part, c.epsilon,
                           c.delta);
  json conds = json::array();
  for (const auto& cond : rep.conditions) {
    conds.push_back(condition_json(cond));
  }
  j["lambda"] = lambda;
  j["epsilon"] = c.epsilon;
  j["delta"] = c.delta;
  j["conditions"] = conds;
  const bool constructed = j["construction"]["verdict"] == "PASS";
  j["verdicts"] = {{"construction", verdict(constructed)}, {"conditions", verdict(!rep.any_fail())}};
  return j;
}

json run_probe(const RunConfig& cfg, const Problem& p, Output& out) {
  const auto& c = cfg.carleman;
  const ShippedWeights w = weights_of(cfg, p.part);
  double lambda = c.probe_lambda;
  if (lambda == 0.0) {
    const ExponentiationResult res = hormander_exponentiation(
        w.plate_psi, w.plate_region, w.wave_psi, w.wave_region, c.lambda_grid, c.epsilon,
        c.delta);
    lambda = res.lambda;
  }
  ProbeConfig pc;
  pc.op = c.probe_operator == ProbeOperatorConfig::Wave        ? ProbeOperator::Wave
          : c.probe_operator == ProbeOperatorConfig::PlatePlus ? ProbeOperator::PlatePlus
                                                                : ProbeOperator::PlateMinus;
  pc.family = c.probe_family == ProbeFamilyConfig::CoherentState ? ProbeFamily::CoherentState
                                                                  : ProbeFamily::FixedBump;
  pc.center = Point2(0.5, c.probe_center_len);
  pc.window_radius = c.probe_window_len;
  pc.width_scale = c.probe_width;
  const WeightFunction phi(pc.op == ProbeOperator::Wave ? w.wave_psi : w.plate_psi, lambda);
  const ProbeTable tab = carleman_ratio_probe(phi, phi, pc, c.h_grid);
  const ProbeTable shifted = carleman_ratio_probe(phi.with_shift(c.probe_shift), phi, pc, c.h_grid);
  double gauge = 0.0;
  json rows = json::array();
  {
    auto os = out.open("probe.csv");
    io::CsvWriter csv(os, {"h", "lhs", "rhs", "ratio", "excluded", "shifted_ratio", "gauge_rel"});
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
      const auto& r = tab.rows[i];
      const double g = std::abs(shifted.rows[i].ratio / r.ratio - 1.0);
      if (!r.excluded) {
        gauge = std::max(gauge, g);
      }
      csv.row({r.h, r.lhs, r.rhs, r.ratio, r.excluded ? 1.0 : 0.0, shifted.rows[i].ratio, g});
      rows.push_back({{"h", r.h}, {"ratio", number(r.ratio)}, {"excluded", r.excluded},
                      {"note", r.note}});
    }
  }
  return {{"operator", to_string(pc.op)},
          {"lambda", lambda},
          {"rows", rows},
          {"spread", number(tab.spread)},
          {"ratio_factor", pc.ratio_factor},
          {"gauge_max_rel", number(gauge)},
          {"verdicts",
           {{"ratio_bounded", to_string(tab.verdict)}, {"gauge_invariance", verdict(gauge <= 1e-10)}}}};
}

json run_splitting(const RunConfig& cfg, const Problem& p, Output& out) {
  const auto& s = cfg.spectral;
  const SplittingStudy st =
      splitting_study(p.part, p.damping, s.splitting_mu_freq, s.splitting_base_elements,
                      s.splitting_levels);
  {
    auto os = out.open("splitting.csv");
    io::CsvWriter csv(os, {"elements", "h", "residual_z1p", "residual_z1pp", "residual_z2",
                           "left_jump_z", "left_jump_dz", "left_theta", "left_dtheta",
                           "right_jump_z", "right_jump_dz", "right_theta", "right_dtheta"});
    for (std::size_t l = 0; l < st.reports.size(); ++l) {
      const auto& r = st.reports[l];
      std::vector<double> row{static_cast<double>(st.elements[l]), st.h[l], r.residual[0],
                              r.residual[1], r.residual[2]};
      for (const auto& side : r.interface_mismatch) {
        row.insert(row.end(), side.begin(), side.end());
      }
      csv.row(row);
    }
  }
  const double min_order = *std::min_element(st.order.begin(), st.order.end());
  return {{"mu", st.mu},
          {"levels", st.reports.size()},
          {"order", {number(st.order[0]), number(st.order[1]), number(st.order[2])}},
          {"decreasing", st.decreasing},
          {"verdicts", {{"converges", verdict(st.decreasing && min_order >= 1.0)}}}};
}

void dump_matrices(const Problem& p, Output& out) {
  const DiscreteSystem sys = assemble(p.part, p.damping, p.mesh);
  auto m = out.open("mass.txt");
  io::write_triplet(m, sys.mass);
  auto k = out.open("stiffness.txt");
  io::write_triplet(k, sys.stiffness);
  auto d = out.open("damping.txt");
  io::write_triplet(d, sys.damping_matrix);
}

bool has_fail(const json& verdicts) {
  return std::any_of(verdicts.begin(), verdicts.end(),
                     [](const json& v) { return v.get<std::string>() == "FAIL"; });
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate",      "spectrum",       "resolvent-sweep",
                                              "decay-fit",     "verify-weight",  "carleman-probe",
                                              "splitting-check"};
  return names;
}

RunOutcome run(const std::string& subcommand, const RunConfig& cfg, const RunOptions& options) {
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
    throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
  }
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  const fs::path dir = options.output_dir.value_or(cfg.output_dir);
  Output out(dir, outcome);
  const Problem p = make_problem(cfg);

  json report;
  if (subcommand == "simulate") {
    report = run_simulate(cfg, p, out);
  } else if (subcommand == "spectrum") {
    report = run_spectrum(cfg, p, out);
  } else if (subcommand == "resolvent-sweep") {
    report = run_sweep(cfg, p, out);
  } else if (subcommand == "decay-fit") {
    report = run_decay(cfg, p, out);
  } else if (subcommand == "verify-weight") {
    report = run_verify(cfg, p, out);
  } else if (subcommand == "carleman-probe") {
    report = run_probe(cfg, p, out);
  } else {
    report = run_splitting(cfg, p, out);
  }
  if (options.dump_matrices) {
    dump_matrices(p, out);
  }
  report["subcommand"] = subcommand;
  outcome.any_fail = has_fail(report["verdicts"]);
  outcome.exit_code = options.strict && outcome.any_fail ? 1 : 0;
  out.json_file(subcommand + ".json", report);
  outcome.report = report;

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string text = canonical(cfg);
  json manifest = {
      {"tool", "platewave"},
      {"version", kVersion},
      {"subcommand", subcommand},
      {"config_hash", io::hex64(io::fnv1a64(text))},
      {"config", text},
      {"seed", cfg.seed},
      {"strict", options.strict},
      {"versions",
       {{"platewave", kVersion},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                      "." + std::to_string(EIGEN_MINOR_VERSION)},
        {"compiler", __VERSION__}}},
      {"wall_time_s", wall},
      {"any_fail", outcome.any_fail},
      {"outputs", outcome.files}};
  out.json_file("manifest.json", manifest);
  return outcome;
}

}  // namespace platewave::cli
