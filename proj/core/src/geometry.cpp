#include "platewave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace platewave {
namespace {

double smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double smoothstep_d1(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }
double smoothstep_d2(double u) {
  return 60.0 * u * (2.0 * u - 1.0) * (u - 1.0);
}

std::vector<double> uniform_nodes(double lo, double hi, int n) {
  std::vector<double> nodes(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    nodes[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n;
  }
  nodes.front() = lo;
  nodes.back() = hi;
  return nodes;
}

std::vector<double> bisect(const std::vector<double>& nodes) {
  std::vector<double> out;
  out.reserve(2 * nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    out.push_back(nodes[i]);
    out.push_back(0.5 * (nodes[i] + nodes[i + 1]));
  }
  out.push_back(nodes.back());
  return out;
}

void append_sizes(const std::vector<double>& nodes, std::vector<double>& out) {
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    out.push_back(nodes[i + 1] - nodes[i]);
  }
}

}  // namespace

DomainPartition make_partition(double s_left, double s_right) {
  DomainPartition p;
  if (!(p.outer_left < s_left && s_left < s_right && s_right < p.outer_right)) {
    std::ostringstream msg;
    msg << "geometry: require 0 < s_left < s_right < 1, got s_left=" << s_left
        << " s_right=" << s_right;
    throw GeometryError(msg.str());
  }
  p.s_left = s_left;
  p.s_right = s_right;
  return p;
}

DampingProfile make_damping(const DomainPartition& part, double omega_left,
                            double omega_right, double amplitude,
                            double margin) {
  if (!(margin > 0.0)) {
    throw GeometryError("damping: margin must be positive");
  }
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw GeometryError("damping: amplitude must be finite and nonnegative");
  }
  // round-off slack so that e.g. 0.1 + 0.05 <= 0.15 holds
  const double slack = 1e-12;
  if (!(part.s_left + margin <= omega_left + slack && omega_left < omega_right &&
        omega_right <= part.s_right - margin + slack)) {
    std::ostringstream msg;
    msg << "damping: support (" << omega_left << ", " << omega_right
        << ") must lie in [s_left + margin, s_right - margin] = ["
        << part.s_left + margin << ", " << part.s_right - margin << "]";
    throw GeometryError(msg.str());
  }
  return DampingProfile{omega_left, omega_right, amplitude, margin, 2};
}

DampingProfile zero_damping(const DomainPartition& part) {
  const double third = part.plate_length() / 3.0;
  return DampingProfile{part.s_left + third, part.s_right - third, 0.0, third,
                        2};
}

DampingJet eval_damping_jet(const DampingProfile& p, double x) {
  DampingJet jet;
  if (p.amplitude == 0.0 || x <= p.omega_left || x >= p.omega_right) {
    return jet;
  }
  const double len = p.omega_right - p.omega_left;
  const double t = (x - p.omega_left) / len;
  // u = 2t on the rising half, 2 - 2t on the falling half.
  const double u = t <= 0.5 ? 2.0 * t : 2.0 - 2.0 * t;
  const double du = (t <= 0.5 ? 2.0 : -2.0) / len;
  jet.value = p.amplitude * smoothstep(u);
  jet.d1 = p.amplitude * smoothstep_d1(u) * du;
  jet.d2 = p.amplitude * smoothstep_d2(u) * du * du;
  return jet;
}

double eval_damping(const DampingProfile& p, double x) {
  return eval_damping_jet(p, x).value;
}

std::vector<double> damping_breakpoints(const DampingProfile& p) {
  return {p.omega_left, p.midpoint(), p.omega_right};
}

double damping_integral(const DampingProfile& p) {
  // Each half integrates S over [0,1] (= 1/2) scaled by len/2.
  return 0.5 * p.amplitude * (p.omega_right - p.omega_left);
}

std::vector<double> Mesh::plate_element_sizes() const {
  std::vector<double> h;
  append_sizes(plate_nodes, h);
  return h;
}

std::vector<double> Mesh::wave_element_sizes() const {
  std::vector<double> h;
  append_sizes(wave_left_nodes, h);
  append_sizes(wave_right_nodes, h);
  return h;
}

double Mesh::max_element_size() const {
  auto hp = plate_element_sizes();
  auto hw = wave_element_sizes();
  hp.insert(hp.end(), hw.begin(), hw.end());
  return *std::max_element(hp.begin(), hp.end());
}

double Mesh::min_element_size() const {
  auto hp = plate_element_sizes();
  auto hw = wave_element_sizes();
  hp.insert(hp.end(), hw.begin(), hw.end());
  return *std::min_element(hp.begin(), hp.end());
}

Mesh build_mesh(const DomainPartition& part, int n_plate, int n_wave) {
  if (n_plate < 2) {
    throw MeshError("mesh: n_plate must be at least 2");
  }
  if (n_wave < 2) {
    throw MeshError("mesh: n_wave must be at least 2 per wave interval");
  }
  Mesh m;
  m.plate_nodes = uniform_nodes(part.s_left, part.s_right, n_plate);
  m.wave_left_nodes = uniform_nodes(part.outer_left, part.s_left, n_wave);
  m.wave_right_nodes = uniform_nodes(part.s_right, part.outer_right, n_wave);
  return m;
}

Mesh build_mesh_for_state_size(const DomainPartition& part, int state_dofs) {
  if (state_dofs < 16 || state_dofs % 4 != 0) {
    throw MeshError("mesh: state size must be a multiple of 4 and at least 16");
  }
  // Free displacement unknowns = 2 n_plate + 2 (n_wave - 1).
  const int disp = state_dofs / 2;
  const int n_plate = std::max(2, disp / 5);
  const int n_wave = (disp - 2 * n_plate) / 2 + 1;
  return build_mesh(part, n_plate, n_wave);
}

Mesh refine(const Mesh& mesh) {
  Mesh m;
  m.plate_nodes = bisect(mesh.plate_nodes);
  m.wave_left_nodes = bisect(mesh.wave_left_nodes);
  m.wave_right_nodes = bisect(mesh.wave_right_nodes);
  return m;
}

}  // namespace platewave
