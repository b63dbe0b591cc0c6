#pragma once

// Planet, atmosphere, vehicle and dispersion models for point-mass entry.
// All quantities are SI.

#include <stdexcept>
#include <string>

namespace entry {

/// Spherical planet with an exponential atmosphere referenced to r_ref.
struct PlanetModel {
  double mu = 4.2828e13;     // m^3/s^2
  double r_ref = 3397.0e3;   // m
  double rho0 = 0.0158;      // kg/m^3 at r_ref
  double h_s = 9354.5;       // m

  void validate() const;
  double altitude(double r) const { return r - r_ref; }
};

struct VehicleModel {
  double mass = 992.0;   // kg
  double area = 16.0;    // m^2
  double cl0 = 0.0970435;
  double cd0 = 0.5391304;

  void validate() const;

  double lift_to_drag() const { return cl0 / cd0; }
  double ballistic_coefficient() const { return mass / (cd0 * area); }

  /// Nominal coefficients from a ballistic coefficient (kg/m^2) and L/D.
  static VehicleModel from_ballistic(double mass, double area, double beta, double lift_to_drag);
};

/// Fractional deviations held constant over a run. All zero is the nominal world.
struct DispersionSet {
  double mass = 0.0;
  double density = 0.0;
  double cl = 0.0;
  double cd = 0.0;

  bool is_nominal() const { return mass == 0.0 && density == 0.0 && cl == 0.0 && cd == 0.0; }
};

struct AeroAccels {
  double lift = 0.0;  // m/s^2
  double drag = 0.0;  // m/s^2
};

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (1 + drho) * rho0 * exp(-h / h_s). Negative h extrapolates.
double atmospheric_density(double h, const PlanetModel& planet, double drho_frac = 0.0);

/// mu / r^2. Throws ModelError for r <= 0.
double gravity(double r, const PlanetModel& planet);

/// Lift and drag accelerations with multiplicative coefficient and mass dispersions.
AeroAccels aero_accels(double rho, double v, const VehicleModel& vehicle,
                       const DispersionSet& disp = {});

}  // namespace entry
