#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace platewave {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InterfaceSide { Left, Right };

/// One-dimensional transmission geometry on [outer_left, outer_right].
///
/// The plate occupies (s_left, s_right); the wave field lives on the two
/// outer intervals. The interface is {s_left, s_right} and the outer
/// boundary is {outer_left, outer_right}.
struct DomainPartition {
  double outer_left = 0.0;
  double outer_right = 1.0;
  double s_left = 0.0;
  double s_right = 0.0;

  double plate_length() const { return s_right - s_left; }
  double wave_length() const {
    return (s_left - outer_left) + (outer_right - s_right);
  }
  double interface_point(InterfaceSide side) const {
    return side == InterfaceSide::Left ? s_left : s_right;
  }
  // Outward unit normal of the plate region at an interface point.
  static double plate_normal(InterfaceSide side) {
    return side == InterfaceSide::Left ? -1.0 : 1.0;
  }
  bool in_plate(double x) const { return x > s_left && x < s_right; }
  bool in_wave(double x) const {
    return (x > outer_left && x < s_left) || (x > s_right && x < outer_right);
  }
};

DomainPartition make_partition(double s_left, double s_right);

/// Localized damping coefficient a(x).
///
/// a is the mirrored quintic smoothstep bump: with t = (x - omega_left) /
/// (omega_right - omega_left), a = amplitude * S(2t) for t <= 1/2 and
/// amplitude * S(2 - 2t) for t > 1/2, S(u) = 6u^5 - 15u^4 + 10u^3. It is C^2,
/// piecewise quintic with breakpoints {omega_left, midpoint, omega_right}, and
/// vanishes identically outside (omega_left, omega_right).
struct DampingProfile {
  double omega_left = 0.0;
  double omega_right = 0.0;
  double amplitude = 0.0;
  double margin = 0.0;
  int smoothness = 2;

  double midpoint() const { return 0.5 * (omega_left + omega_right); }
  bool is_zero() const { return amplitude == 0.0; }
};

DampingProfile make_damping(const DomainPartition& part, double omega_left,
                            double omega_right, double amplitude,
                            double margin);

/// Damping profile that is identically zero (conservative system).
DampingProfile zero_damping(const DomainPartition& part);

double eval_damping(const DampingProfile& p, double x);

struct DampingJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

DampingJet eval_damping_jet(const DampingProfile& p, double x);

// Breakpoints of the piecewise-polynomial bump, sorted.
std::vector<double> damping_breakpoints(const DampingProfile& p);

// Exact integral of a over the real line.
double damping_integral(const DampingProfile& p);

struct Mesh {
  std::vector<double> plate_nodes;
  std::vector<double> wave_left_nodes;
  std::vector<double> wave_right_nodes;

  std::size_t n_plate_elements() const { return plate_nodes.size() - 1; }
  std::size_t n_wave_left_elements() const { return wave_left_nodes.size() - 1; }
  std::size_t n_wave_right_elements() const {
    return wave_right_nodes.size() - 1;
  }
  std::vector<double> plate_element_sizes() const;
  std::vector<double> wave_element_sizes() const;
  double max_element_size() const;
  double min_element_size() const;
};

/// Uniform meshes: n_plate elements on the plate, n_wave elements on each of
/// the two wave intervals. Interface coordinates are nodes of both adjacent
/// meshes.
Mesh build_mesh(const DomainPartition& part, int n_plate, int n_wave);

/// Mesh sized so that the first-order state (U, V) has state_dofs free
/// coefficients. state_dofs must be a multiple of 4; the plate receives
/// roughly a fifth of the displacement unknowns.
Mesh build_mesh_for_state_size(const DomainPartition& part, int state_dofs);

Mesh refine(const Mesh& mesh);

}  // namespace platewave
