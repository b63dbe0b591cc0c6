#pragma once

// Point-mass equations of motion over a non-rotating spherical planet in a
// stationary atmosphere.

#include <stdexcept>

#include "entry/models.hpp"

namespace entry {

struct EntryState {
  double r = 0.0;      // radial position, m
  double lon = 0.0;    // longitude, rad (unwrapped)
  double lat = 0.0;    // latitude, rad
  double v = 0.0;      // speed, m/s
  double gamma = 0.0;  // flight path angle, rad
  double chi = 0.0;    // heading angle, rad

  friend bool operator==(const EntryState&, const EntryState&) = default;
};

/// Time derivatives of the EntryState fields, same order.
struct StateDerivative {
  double r = 0.0;
  double lon = 0.0;
  double lat = 0.0;
  double v = 0.0;
  double gamma = 0.0;
  double chi = 0.0;

  friend bool operator==(const StateDerivative&, const StateDerivative&) = default;
};

/// Raised when a trajectory leaves the domain where the equations are defined
/// (cos(lat) = 0, cos(gamma) = 0, r <= 0 or v <= 0).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check_domain(const EntryState& s);

StateDerivative eom_rhs(const EntryState& s, double sigma, const PlanetModel& planet,
                        const VehicleModel& vehicle, const DispersionSet& disp = {});

/// Surface arc-length rate v cos(gamma).
double downrange_rate(const EntryState& s);

/// v^2/2 - mu/r.
double specific_energy(const EntryState& s, const PlanetModel& planet);

/// Heading to (-pi, pi]. Longitude is left unwrapped.
void normalize_angles(EntryState& s);

}  // namespace entry
