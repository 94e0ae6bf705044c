#include "config.hpp"

#include "platewave/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace platewave::cli {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

double to_double(const std::string& path, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) {
    throw ConfigError(path, "expected a finite number, got '" + v + "'");
  }
  return x;
}

std::int64_t to_int(const std::string& path, const std::string& v) {
  std::int64_t x = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(path, "expected an integer, got '" + v + "'");
  }
  return x;
}

int to_int32(const std::string& path, const std::string& v) {
  const std::int64_t x = to_int(path, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ConfigError(path, "integer out of range");
  }
  return static_cast<int>(x);
}

template <class E>
E to_enum(const std::string& path, const std::string& v,
          const std::vector<std::pair<std::string, E>>& names) {
  std::string allowed;
  for (const auto& [n, e] : names) {
    if (n == v) {
      return e;
    }
    allowed += (allowed.empty() ? "" : ", ") + n;
  }
  throw ConfigError(path, "expected one of {" + allowed + "}, got '" + v + "'");
}

template <class E>
std::string from_enum(E e, const std::vector<std::pair<std::string, E>>& names) {
  for (const auto& [n, x] : names) {
    if (x == e) {
      return n;
    }
  }
  return "?";
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (double x : v) {
    out += (out.empty() ? "" : ", ") + io::format_double(x);
  }
  return out;
}

const std::vector<std::pair<std::string, SeedKindConfig>> kSeedKinds{
    {"smooth", SeedKindConfig::Smooth}, {"random", SeedKindConfig::Random}};
const std::vector<std::pair<std::string, GridSpacing>> kSpacings{
    {"linear", GridSpacing::Linear}, {"log", GridSpacing::Log}};
const std::vector<std::pair<std::string, PsiChoice>> kPsi{{"shipped", PsiChoice::Shipped},
                                                          {"linear", PsiChoice::Linear}};
const std::vector<std::pair<std::string, ProbeOperatorConfig>> kOps{
    {"wave", ProbeOperatorConfig::Wave},
    {"plate+", ProbeOperatorConfig::PlatePlus},
    {"plate-", ProbeOperatorConfig::PlateMinus}};
const std::vector<std::pair<std::string, ProbeFamilyConfig>> kFamilies{
    {"coherent", ProbeFamilyConfig::CoherentState}, {"bump", ProbeFamilyConfig::FixedBump}};

struct Key {
  std::function<void(RunConfig&, const std::string& path, const std::string& value)> set;
  std::function<std::string(const RunConfig&)> get;
};

using Schema = std::vector<std::pair<std::string, std::vector<std::pair<std::string, Key>>>>;

template <class Block>
Key real_key(Block RunConfig::*block, double Block::*field) {
  return {[=](RunConfig& c, const std::string& p, const std::string& v) {
            c.*block.*field = to_double(p, v);
          },
          [=](const RunConfig& c) { return io::format_double(c.*block.*field); }};
}

template <class Block>
Key int_key(Block RunConfig::*block, int Block::*field) {
  return {[=](RunConfig& c, const std::string& p, const std::string& v) {
            c.*block.*field = to_int32(p, v);
          },
          [=](const RunConfig& c) { return std::to_string(c.*block.*field); }};
}

template <class Block, class E>
Key enum_key(Block RunConfig::*block, E Block::*field,
             const std::vector<std::pair<std::string, E>>& names) {
  return {[=, &names](RunConfig& c, const std::string& p, const std::string& v) {
            c.*block.*field = to_enum(p, v, names);
          },
          [=, &names](const RunConfig& c) { return from_enum(c.*block.*field, names); }};
}

template <class Block>
Key list_key(Block RunConfig::*block, std::vector<double> Block::*field) {
  return {[=](RunConfig& c, const std::string& p, const std::string& v) {
            std::vector<double> out;
            for (const auto& item : split(v, ',')) {
              out.push_back(to_double(p, item));
            }
            c.*block.*field = out;
          },
          [=](const RunConfig& c) { return join(c.*block.*field); }};
}

const Schema& schema() {
  static const Schema s = [] {
    using R = RunConfig;
    Schema out;
    out.push_back({"run",
                   {{"output_dir",
                     {[](R& c, const std::string&, const std::string& v) { c.output_dir = v; },
                      [](const R& c) { return c.output_dir.string(); }}},
                    {"seed",
                     {[](R& c, const std::string& p, const std::string& v) {
                        const std::int64_t x = to_int(p, v);
                        if (x < 0) {
                          throw ConfigError(p, "seed must be nonnegative");
                        }
                        c.seed = static_cast<std::uint64_t>(x);
                      },
                      [](const R& c) { return std::to_string(c.seed); }}}}});
    out.push_back({"geometry",
                   {{"s_left_len", real_key(&R::geometry, &GeometryConfig::s_left_len)},
                    {"s_right_len", real_key(&R::geometry, &GeometryConfig::s_right_len)}}});
    out.push_back(
        {"damping",
         {{"omega_left_len", real_key(&R::damping, &DampingConfig::omega_left_len)},
          {"omega_right_len", real_key(&R::damping, &DampingConfig::omega_right_len)},
          {"amplitude_time", real_key(&R::damping, &DampingConfig::amplitude_time)},
          {"margin_len", real_key(&R::damping, &DampingConfig::margin_len)}}});
    out.push_back({"mesh",
                   {{"n_plate", int_key(&R::mesh, &MeshConfig::n_plate)},
                    {"n_wave", int_key(&R::mesh, &MeshConfig::n_wave)},
                    {"state_dofs", int_key(&R::mesh, &MeshConfig::state_dofs)}}});
    out.push_back({"time",
                   {{"dt_time", real_key(&R::time, &TimeConfig::dt_time)},
                    {"n_steps", int_key(&R::time, &TimeConfig::n_steps)},
                    {"snapshot_stride", int_key(&R::time, &TimeConfig::snapshot_stride)},
                    {"k", int_key(&R::time, &TimeConfig::k)},
                    {"seed_kind", enum_key(&R::time, &TimeConfig::seed_kind, kSeedKinds)}}});
    out.push_back(
        {"spectral",
         {{"mu_max_freq", real_key(&R::spectral, &SpectralConfig::mu_max_freq)},
          {"sweep_mu_min_freq", real_key(&R::spectral, &SpectralConfig::sweep_mu_min_freq)},
          {"sweep_mu_max_freq", real_key(&R::spectral, &SpectralConfig::sweep_mu_max_freq)},
          {"sweep_points", int_key(&R::spectral, &SpectralConfig::sweep_points)},
          {"sweep_spacing", enum_key(&R::spectral, &SpectralConfig::sweep_spacing, kSpacings)},
          {"norm_tolerance", real_key(&R::spectral, &SpectralConfig::norm_tolerance)},
          {"threads", int_key(&R::spectral, &SpectralConfig::threads)},
          {"splitting_mu_freq", real_key(&R::spectral, &SpectralConfig::splitting_mu_freq)},
          {"splitting_levels", int_key(&R::spectral, &SpectralConfig::splitting_levels)},
          {"splitting_base_elements",
           int_key(&R::spectral, &SpectralConfig::splitting_base_elements)}}});
    out.push_back(
        {"carleman",
         {{"psi", enum_key(&R::carleman, &CarlemanConfig::psi, kPsi)},
          {"kappa", real_key(&R::carleman, &CarlemanConfig::kappa)},
          {"strip_radius_len", real_key(&R::carleman, &CarlemanConfig::strip_radius_len)},
          {"balls",
           {[](R& c, const std::string& p, const std::string& v) {
              c.carleman.balls.clear();
              for (const auto& item : split(v, ',')) {
                const auto parts = split(item, '@');
                if (parts.size() != 2) {
                  throw ConfigError(p, "expected center@radius, got '" + item + "'");
                }
                c.carleman.balls.push_back({to_double(p, parts[0]), to_double(p, parts[1])});
              }
            },
            [](const R& c) {
              std::string out;
              for (const auto& b : c.carleman.balls) {
                out += (out.empty() ? "" : ", ") + io::format_double(b.center_len) + "@" +
                       io::format_double(b.radius_len);
              }
              return out;
            }}},
          {"lambda_grid", list_key(&R::carleman, &CarlemanConfig::lambda_grid)},
          {"epsilon", real_key(&R::carleman, &CarlemanConfig::epsilon)},
          {"delta", real_key(&R::carleman, &CarlemanConfig::delta)},
          {"h_grid", list_key(&R::carleman, &CarlemanConfig::h_grid)},
          {"probe_operator", enum_key(&R::carleman, &CarlemanConfig::probe_operator, kOps)},
          {"probe_family", enum_key(&R::carleman, &CarlemanConfig::probe_family, kFamilies)},
          {"probe_center_len", real_key(&R::carleman, &CarlemanConfig::probe_center_len)},
          {"probe_window_len", real_key(&R::carleman, &CarlemanConfig::probe_window_len)},
          {"probe_width", real_key(&R::carleman, &CarlemanConfig::probe_width)},
          {"probe_lambda", real_key(&R::carleman, &CarlemanConfig::probe_lambda)},
          {"probe_shift", real_key(&R::carleman, &CarlemanConfig::probe_shift)}}});
    return out;
  }();
  return s;
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) {
    throw ConfigError(path, message);
  }
}

}  // namespace

ConfigError::ConfigError(std::string key_path, const std::string& message)
    : std::runtime_error(key_path + ": " + message), key_path_(std::move(key_path)) {}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(section, "key outside of a section");
    }
    const auto sec = std::find_if(schema().begin(), schema().end(),
                                  [&](const auto& s) { return s.first == section; });
    if (sec == schema().end()) {
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      const std::string path = section + "." + key;
      const auto k = std::find_if(sec->second.begin(), sec->second.end(),
                                  [&](const auto& e) { return e.first == key; });
      if (k == sec->second.end()) {
        throw ConfigError(path, "unknown key");
      }
      k->second.set(cfg, path, trim(value.data()));
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(path.string(), "cannot open config file");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate(const RunConfig& c) {
  const auto& g = c.geometry;
  require(g.s_left_len > 0.0 && g.s_left_len < g.s_right_len && g.s_right_len < 1.0,
          "geometry.s_left_len", "need 0 < s_left_len < s_right_len < 1");
  const auto& d = c.damping;
  require(d.amplitude_time >= 0.0, "damping.amplitude_time", "must be nonnegative");
  if (d.amplitude_time > 0.0) {
    require(d.margin_len > 0.0, "damping.margin_len", "must be positive");
    require(d.omega_left_len < d.omega_right_len, "damping.omega_left_len",
            "need omega_left_len < omega_right_len");
    require(d.omega_left_len >= g.s_left_len + d.margin_len - 1e-12, "damping.omega_left_len",
            "support must stay margin_len inside the plate");
    require(d.omega_right_len <= g.s_right_len - d.margin_len + 1e-12,
            "damping.omega_right_len", "support must stay margin_len inside the plate");
  }
  const auto& m = c.mesh;
  require(m.n_plate >= 0, "mesh.n_plate", "must be nonnegative");
  require(m.n_wave >= 0, "mesh.n_wave", "must be nonnegative");
  require((m.n_plate == 0) == (m.n_wave == 0), "mesh.n_plate",
          "set both n_plate and n_wave, or neither");
  if (m.n_plate == 0) {
    require(m.state_dofs >= 16, "mesh.state_dofs", "must be at least 16");
  } else {
    require(m.n_plate >= 2, "mesh.n_plate", "must be at least 2");
    require(m.n_wave >= 2, "mesh.n_wave", "must be at least 2");
  }
  const auto& t = c.time;
  require(t.dt_time >= 0.0, "time.dt_time", "must be nonnegative (0 selects h_min)");
  require(t.n_steps >= 0, "time.n_steps", "must be nonnegative");
  require(t.snapshot_stride >= 1, "time.snapshot_stride", "must be at least 1");
  require(t.k >= 0, "time.k", "must be nonnegative");
  const auto& s = c.spectral;
  require(s.mu_max_freq >= 0.0, "spectral.mu_max_freq", "must be nonnegative");
  require(s.sweep_mu_min_freq > 0.0, "spectral.sweep_mu_min_freq", "must be positive");
  require(s.sweep_mu_max_freq > s.sweep_mu_min_freq, "spectral.sweep_mu_max_freq",
          "must exceed sweep_mu_min_freq");
  require(s.sweep_points >= 2, "spectral.sweep_points", "must be at least 2");
  require(s.norm_tolerance > 0.0 && s.norm_tolerance < 1.0, "spectral.norm_tolerance",
          "must lie in (0, 1)");
  require(s.threads >= 0, "spectral.threads", "must be nonnegative");
  require(s.splitting_mu_freq != 0.0, "spectral.splitting_mu_freq", "must be nonzero");
  require(s.splitting_levels >= 2, "spectral.splitting_levels", "must be at least 2");
  require(s.splitting_base_elements >= 2, "spectral.splitting_base_elements",
          "must be at least 2");
  const auto& k = c.carleman;
  require(k.kappa > 0.0, "carleman.kappa", "must be positive");
  require(k.strip_radius_len > 0.0, "carleman.strip_radius_len", "must be positive");
  for (const auto& b : k.balls) {
    require(b.radius_len > 0.0, "carleman.balls", "radii must be positive");
    require(b.center_len > g.s_left_len && b.center_len < g.s_right_len, "carleman.balls",
            "centers must lie in the plate");
  }
  require(!k.lambda_grid.empty(), "carleman.lambda_grid", "must be non-empty");
  for (double l : k.lambda_grid) {
    require(l >= 0.0, "carleman.lambda_grid", "entries must be nonnegative");
  }
  require(k.epsilon > 0.0, "carleman.epsilon", "must be positive");
  require(k.delta > 0.0, "carleman.delta", "must be positive");
  require(!k.h_grid.empty(), "carleman.h_grid", "must be non-empty");
  for (std::size_t i = 0; i < k.h_grid.size(); ++i) {
    require(k.h_grid[i] > 0.0 && (i == 0 || k.h_grid[i] < k.h_grid[i - 1]), "carleman.h_grid",
            "must be positive and strictly decreasing");
  }
  require(k.probe_window_len > 0.0, "carleman.probe_window_len", "must be positive");
  require(k.probe_width > 0.0, "carleman.probe_width", "must be positive");
  require(k.probe_lambda >= 0.0, "carleman.probe_lambda", "must be nonnegative");
  require(c.output_dir.string().size() > 0, "run.output_dir", "must be non-empty");
}

std::string canonical(const RunConfig& cfg) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [section, keys] : schema()) {
    os << (first ? "" : "\n") << '[' << section << "]\n";
    first = false;
    for (const auto& [name, key] : keys) {
      os << name << " = " << key.get(cfg) << '\n';
    }
  }
  return os.str();
}

}  // namespace platewave::cli
