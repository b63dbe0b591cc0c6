#include "entry/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace entry {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"planet", {"mu_m3_s2", "radius_km", "rho0_kg_m3", "scale_height_m"}},
      {"vehicle", {"mass_kg", "area_m2", "ballistic_coefficient_kg_m2", "lift_to_drag"}},
      {"initial",
       {"altitude_km", "velocity_km_s", "flight_path_angle_deg", "longitude_deg", "latitude_deg",
        "heading_deg"}},
      {"terminal", {"altitude_km", "velocity_m_s", "downrange_km"}},
      {"guidance", {"a", "b", "eps0", "g0_floor_m_s4", "trigger_drag_m_s2"}},
      {"observer", {"l1", "l2", "eps"}},
      {"integrator", {"dt_s", "max_time_s"}},
      {"measurement", {"drag_noise_std_m_s2", "seed"}},
      {"reference", {"bank_family", "switch_time_s", "ramp_s"}},
      {"montecarlo",
       {"a", "b", "eps0", "eps", "mass_min_pct", "mass_max_pct", "density_min_pct",
        "density_max_pct", "cl_min_pct", "cl_max_pct", "cd_min_pct", "cd_max_pct"}},
      {"paths", {"reference_profile"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  void number(const std::string& key, double& out, double scale = 1.0) const {
    const auto v = tree_.get_optional<std::string>(key);
    if (!v) return;
    try {
      std::size_t used = 0;
      const double x = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument("trailing characters");
      out = x * scale;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': '" + *v + "' is not a number");
    }
  }

  std::optional<std::string> text(const std::string& key) const {
    const auto v = tree_.get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return *v;
  }

 private:
  const pt::ptree& tree_;
};

}  // namespace

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.vehicle = VehicleModel::from_ballistic(992.0, 16.0, 115.0, 0.18);
  c.initial.r = c.planet.r_ref + 126.1e3;
  c.initial.lon = 0.0;
  c.initial.lat = 0.0;
  c.initial.v = 6750.0;
  c.initial.gamma = -14.4 * kDeg;
  c.initial.chi = 90.0 * kDeg;
  c.terminal = {10.0e3, 503.0};
  c.refgen.target_downrange = 723.32e3;
  c.refgen.target_altitude = 10.0e3;

  c.guidance.a = 1.982;
  c.guidance.b = 3.0;
  c.guidance.eps0 = 5.0;
  c.guidance.l1 = 2.0;
  c.guidance.l2 = 1.0;
  c.guidance.eps = 0.481;

  c.mc_guidance = c.guidance;
  c.mc_guidance.a = 20.0;
  c.mc_guidance.b = 5.0;
  c.mc_guidance.eps0 = 20.0;
  c.mc_guidance.eps = 0.45;
  return c;
}

RunConfig ScenarioConfig::run_config(GuidanceMode mode,
                                     std::shared_ptr<const ReferenceProfile> reference) const {
  RunConfig r;
  r.mode = mode;
  r.dt = dt;
  r.max_time = max_time;
  r.planet = planet;
  r.vehicle = vehicle;
  r.guidance = guidance;
  r.reference = std::move(reference);
  r.initial = initial;
  r.terminal = terminal;
  r.drag_noise_std = drag_noise_std;
  r.trigger_drag = trigger_drag;
  r.seed = seed;
  return r;
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed scenario file: ") + e.what());
  }

  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end() || !body.data().empty()) {
      throw ConfigError("unknown config section '" + section + "'");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw ConfigError("unknown config key '" + section + "." + key + "'");
      }
    }
  }

  ScenarioConfig c = default_scenario();
  const Reader r(tree);

  double radius = c.planet.r_ref;
  r.number("planet.mu_m3_s2", c.planet.mu);
  r.number("planet.radius_km", radius, 1e3);
  r.number("planet.rho0_kg_m3", c.planet.rho0);
  r.number("planet.scale_height_m", c.planet.h_s);
  c.planet.r_ref = radius;

  double mass = c.vehicle.mass, area = c.vehicle.area;
  double beta = c.vehicle.ballistic_coefficient(), ld = c.vehicle.lift_to_drag();
  r.number("vehicle.mass_kg", mass);
  r.number("vehicle.area_m2", area);
  r.number("vehicle.ballistic_coefficient_kg_m2", beta);
  r.number("vehicle.lift_to_drag", ld);

  double h0 = 126.1e3;
  r.number("initial.altitude_km", h0, 1e3);
  r.number("initial.velocity_km_s", c.initial.v, 1e3);
  r.number("initial.flight_path_angle_deg", c.initial.gamma, kDeg);
  r.number("initial.longitude_deg", c.initial.lon, kDeg);
  r.number("initial.latitude_deg", c.initial.lat, kDeg);
  r.number("initial.heading_deg", c.initial.chi, kDeg);
  c.initial.r = c.planet.r_ref + h0;

  r.number("terminal.altitude_km", c.terminal.altitude, 1e3);
  r.number("terminal.velocity_m_s", c.terminal.velocity);
  r.number("terminal.downrange_km", c.refgen.target_downrange, 1e3);
  c.refgen.target_altitude = c.terminal.altitude;

  r.number("guidance.a", c.guidance.a);
  r.number("guidance.b", c.guidance.b);
  r.number("guidance.eps0", c.guidance.eps0);
  r.number("guidance.g0_floor_m_s4", c.guidance.g0_floor);
  r.number("guidance.trigger_drag_m_s2", c.trigger_drag);
  r.number("observer.l1", c.guidance.l1);
  r.number("observer.l2", c.guidance.l2);
  r.number("observer.eps", c.guidance.eps);

  c.mc_guidance.l1 = c.guidance.l1;
  c.mc_guidance.l2 = c.guidance.l2;
  c.mc_guidance.g0_floor = c.guidance.g0_floor;
  r.number("montecarlo.a", c.mc_guidance.a);
  r.number("montecarlo.b", c.mc_guidance.b);
  r.number("montecarlo.eps0", c.mc_guidance.eps0);
  r.number("montecarlo.eps", c.mc_guidance.eps);
  r.number("montecarlo.mass_min_pct", c.dispersions.mass.lo, 1e-2);
  r.number("montecarlo.mass_max_pct", c.dispersions.mass.hi, 1e-2);
  r.number("montecarlo.density_min_pct", c.dispersions.density.lo, 1e-2);
  r.number("montecarlo.density_max_pct", c.dispersions.density.hi, 1e-2);
  r.number("montecarlo.cl_min_pct", c.dispersions.cl.lo, 1e-2);
  r.number("montecarlo.cl_max_pct", c.dispersions.cl.hi, 1e-2);
  r.number("montecarlo.cd_min_pct", c.dispersions.cd.lo, 1e-2);
  r.number("montecarlo.cd_max_pct", c.dispersions.cd.hi, 1e-2);

  r.number("integrator.dt_s", c.dt);
  r.number("integrator.max_time_s", c.max_time);
  r.number("measurement.drag_noise_std_m_s2", c.drag_noise_std);
  double seed = static_cast<double>(c.seed);
  r.number("measurement.seed", seed);
  if (!(seed >= 0.0) || seed != std::floor(seed)) {
    throw ConfigError("measurement.seed must be a non-negative integer");
  }
  c.seed = static_cast<std::uint64_t>(seed);

  if (const auto family = r.text("reference.bank_family")) {
    if (*family == "constant") {
      c.refgen.family = RefgenOptions::Family::constant;
    } else if (*family == "two_segment") {
      c.refgen.family = RefgenOptions::Family::two_segment;
    } else {
      throw ConfigError("reference.bank_family must be 'constant' or 'two_segment'");
    }
  }
  r.number("reference.switch_time_s", c.refgen.t_switch);
  r.number("reference.ramp_s", c.refgen.ramp);

  if (const auto path = r.text("paths.reference_profile")) {
    std::filesystem::path p(*path);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    if (!std::filesystem::exists(p)) {
      throw ConfigError("referenced file does not exist: " + p.string());
    }
    c.reference_profile = p.string();
  }

  try {
    c.planet.validate();
    c.vehicle = VehicleModel::from_ballistic(mass, area, beta, ld);
    c.guidance.validate();
    c.mc_guidance.validate();
    c.dispersions.validate();
    check_domain(c.initial);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  }
  if (!(c.dt > 0.0) || !(c.max_time > 0.0)) {
    throw ConfigError("integrator.dt_s and integrator.max_time_s must be positive");
  }
  if (!(c.terminal.velocity > 0.0)) throw ConfigError("terminal.velocity_m_s must be positive");
  if (!(c.drag_noise_std >= 0.0)) throw ConfigError("drag noise std must be non-negative");
  if (!(c.trigger_drag >= 0.0)) throw ConfigError("guidance.trigger_drag_m_s2 must be non-negative");
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_scenario(buf.str(), dir.empty() ? "." : dir.string());
}

}  // namespace entry
