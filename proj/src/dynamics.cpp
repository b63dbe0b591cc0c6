#include "entry/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace entry {

void check_domain(const EntryState& s) {
  if (!(s.r > 0.0)) throw DomainError("radial position is not positive");
  if (!(s.v > 0.0)) throw DomainError("speed is not positive");
  if (!(std::abs(s.gamma) < 0.5 * std::numbers::pi)) {
    throw DomainError("flight path angle reached +-90 deg (cos(gamma) = 0)");
  }
  if (!(std::abs(s.lat) < 0.5 * std::numbers::pi)) {
    throw DomainError("latitude reached +-90 deg (cos(lat) = 0)");
  }
}

StateDerivative eom_rhs(const EntryState& s, double sigma, const PlanetModel& planet,
                        const VehicleModel& vehicle, const DispersionSet& disp) {
  check_domain(s);
  const double rho = atmospheric_density(planet.altitude(s.r), planet, disp.density);
  const double g = gravity(s.r, planet);
  const auto [lift, drag] = aero_accels(rho, s.v, vehicle, disp);

  const double sg = std::sin(s.gamma);
  const double cg = std::cos(s.gamma);
  const double sx = std::sin(s.chi);
  const double cx = std::cos(s.chi);

  StateDerivative d;
  d.r = s.v * sg;
  d.lon = s.v * cg * sx / (s.r * std::cos(s.lat));
  d.lat = s.v * cg * cx / s.r;
  d.v = -drag - g * sg;
  d.gamma = lift * std::cos(sigma) / s.v - (g / s.v - s.v / s.r) * cg;
  d.chi = lift * std::sin(sigma) / (s.v * cg) + s.v * cg * sx * std::tan(s.lat) / s.r;
  return d;
}

double downrange_rate(const EntryState& s) { return s.v * std::cos(s.gamma); }

double specific_energy(const EntryState& s, const PlanetModel& planet) {
  return 0.5 * s.v * s.v - planet.mu / s.r;
}

void normalize_angles(EntryState& s) {
  s.chi = std::remainder(s.chi, 2.0 * std::numbers::pi);
  if (s.chi == -std::numbers::pi) s.chi = std::numbers::pi;
}

}  // namespace entry
