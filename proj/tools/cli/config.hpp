#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace platewave::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key_path, const std::string& message);
  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

// Lengths are fractions of the unit interval (suffix _len), times are in the
// time unit of the equations (_time), frequencies are imaginary-axis
// coordinates (_freq).
struct GeometryConfig {
  double s_left_len = 0.1;
  double s_right_len = 0.9;
};

struct DampingConfig {
  double omega_left_len = 0.15;
  double omega_right_len = 0.85;
  double amplitude_time = 1.0;
  double margin_len = 0.05;
};

struct MeshConfig {
  int n_plate = 0;
  int n_wave = 0;
  // total free coefficients of the state; used when n_plate = n_wave = 0
  int state_dofs = 400;
};

enum class SeedKindConfig { Smooth, Random };

struct TimeConfig {
  double dt_time = 0.0;  // 0 selects the smallest element size
  int n_steps = 10000;
  int snapshot_stride = 1;
  int k = 1;
  SeedKindConfig seed_kind = SeedKindConfig::Smooth;
};

enum class GridSpacing { Linear, Log };

struct SpectralConfig {
  double mu_max_freq = 0.0;  // 0 selects pi / (4 h_max)
  double sweep_mu_min_freq = 1.0;
  double sweep_mu_max_freq = 100.0;
  int sweep_points = 100;
  GridSpacing sweep_spacing = GridSpacing::Linear;
  double norm_tolerance = 1e-6;
  int threads = 0;
  double splitting_mu_freq = 3.0;
  int splitting_levels = 5;
  int splitting_base_elements = 8;
};

enum class PsiChoice { Shipped, Linear };
enum class ProbeOperatorConfig { Wave, PlatePlus, PlateMinus };
enum class ProbeFamilyConfig { CoherentState, FixedBump };

struct StripBall {
  double center_len = 0.0;
  double radius_len = 0.0;
};

struct CarlemanConfig {
  PsiChoice psi = PsiChoice::Shipped;
  double kappa = 5.0;
  double strip_radius_len = 0.05;
  // replace the shipped strip when non-empty
  std::vector<StripBall> balls;
  std::vector<double> lambda_grid{0, 1, 2, 4, 8, 16, 32, 64, 128, 256};
  double epsilon = 1e-2;
  double delta = 1e-3;
  std::vector<double> h_grid{0.1, 0.05, 0.025, 0.0125};
  ProbeOperatorConfig probe_operator = ProbeOperatorConfig::Wave;
  ProbeFamilyConfig probe_family = ProbeFamilyConfig::CoherentState;
  double probe_center_len = 0.05;
  double probe_window_len = 0.045;
  double probe_width = 0.1;
  double probe_lambda = 0.0;  // 0 uses the constructed lambda
  double probe_shift = 0.7;
};

struct RunConfig {
  GeometryConfig geometry;
  DampingConfig damping;
  MeshConfig mesh;
  TimeConfig time;
  SpectralConfig spectral;
  CarlemanConfig carleman;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
};

/// Parses a sectioned key = value file. Unknown sections or keys, malformed
/// values and violated invariants raise ConfigError naming the key path
/// (section.key).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Checks every invariant that the core modules would reject later, so that
/// errors carry the offending key path.
void validate(const RunConfig& cfg);

/// Canonical text form: every key in a fixed order with 17-digit numbers.
/// parse_config(canonical(c)) reproduces c.
std::string canonical(const RunConfig& cfg);

}  // namespace platewave::cli
