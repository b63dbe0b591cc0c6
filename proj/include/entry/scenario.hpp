#pragma once

// Scenario file: INI-style sections of key = value pairs with units in the
// key names. SI internally; km and degrees are converted on load.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "entry/guidance.hpp"
#include "entry/models.hpp"
#include "entry/montecarlo.hpp"
#include "entry/reference.hpp"
#include "entry/sim.hpp"

namespace entry {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  PlanetModel planet;
  VehicleModel vehicle;
  EntryState initial;
  TerminalConditions terminal;
  GuidanceConfig guidance;     // nominal experiments
  GuidanceConfig mc_guidance;  // Monte Carlo experiments
  double dt = 0.05;
  double max_time = 2000.0;
  double drag_noise_std = 0.0;
  double trigger_drag = 0.5;  // m/s^2, 0 starts the reference clock at entry
  std::uint64_t seed = 1;
  RefgenOptions refgen;
  DispersionSpec dispersions;
  std::optional<std::string> reference_profile;  // resolved path, must exist

  RunConfig run_config(GuidanceMode mode,
                       std::shared_ptr<const ReferenceProfile> reference = nullptr) const;
};

/// The Mars entry scenario: 992 kg, 16 m^2, beta = 115 kg/m^2, L/D = 0.18,
/// entry at 126.1 km, 6.75 km/s, -14.4 deg; terminal 503 m/s at 10 km.
ScenarioConfig default_scenario();

/// Parses a scenario file over the defaults. Unknown sections or keys,
/// malformed numbers and missing referenced files raise ConfigError.
ScenarioConfig load_scenario(const std::string& path);

/// Parses scenario text; relative paths resolve against `base_dir`.
ScenarioConfig parse_scenario(const std::string& text, const std::string& base_dir = ".");

}  // namespace entry
