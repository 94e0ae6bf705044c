#pragma once

#include "platewave/carleman.hpp"

#include <string>
#include <vector>

namespace platewave {

enum class ProbeOperator { PlatePlus, PlateMinus, Wave };
enum class ProbeFamily { CoherentState, FixedBump };

std::string to_string(ProbeOperator op);

/// Test families, both supported in the ball |x - center| < window_radius
/// through the cutoff chi = (1 - |x - center|^2 / R^2)^4:
///   FixedBump:      w = amplitude chi G_sigma with a fixed width sigma.
///   CoherentState:  w = amplitude e^{-(phi_ref - phi_ref(center))/h} chi G
///                   cos(eta tau . (x - center) / h), G of width
///                   width_scale sqrt(h), tau perpendicular to grad phi_ref
///                   and eta^2 = |grad phi_ref(center)|^2 + c, so that the
///                   state concentrates on a characteristic point of the
///                   conjugated symbol.
struct ProbeConfig {
  ProbeOperator op = ProbeOperator::Wave;
  ProbeFamily family = ProbeFamily::CoherentState;
  Point2 center = Point2(0.5, 0.05);
  double window_radius = 0.045;
  double width_scale = 0.1;
  double amplitude = 1.0;
  double grid_spacing = 1.0 / 4000.0;
  double ratio_factor = 3.0;
};

struct ProbeRow {
  double h = 0.0;
  // both sides carry the common factor exp(-2 max rho / h), rho the exponent
  // of e^{phi/h} w relative to the envelope
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool excluded = false;
  std::string note;
};

struct ProbeTable {
  std::vector<ProbeRow> rows;
  double spread = 0.0;  // max/min ratio over the last three retained rows
  Verdict verdict = Verdict::Vacuous;
};

/// LHS = h ||e^{phi/h} w||^2 + h^3 ||e^{phi/h} grad w||^2 and
/// RHS = h^4 ||e^{phi/h} A w||^2 with A = -Delta - 1/h^2 (wave) or
/// -Delta +- 1/h (plate), integrated on a uniform grid over the window.
/// The h grid must be strictly decreasing.
ProbeTable carleman_ratio_probe(const WeightFunction& phi, const WeightFunction& phi_ref,
                                const ProbeConfig& config, const std::vector<double>& h_grid);

}  // namespace platewave
