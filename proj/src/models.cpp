#include "entry/models.hpp"

#include <cmath>

namespace entry {

void PlanetModel::validate() const {
  if (!(mu > 0.0) || !(r_ref > 0.0) || !(rho0 > 0.0) || !(h_s > 0.0)) {
    throw ModelError("planet model: mu, r_ref, rho0 and h_s must be strictly positive");
  }
}

void VehicleModel::validate() const {
  if (!(mass > 0.0)) throw ModelError("vehicle model: mass must be positive");
  if (!(area > 0.0)) throw ModelError("vehicle model: reference area must be positive");
  if (!(cd0 > 0.0)) throw ModelError("vehicle model: cd0 must be positive");
  if (!(cl0 >= 0.0)) throw ModelError("vehicle model: cl0 must be non-negative");
}

VehicleModel VehicleModel::from_ballistic(double mass, double area, double beta,
                                          double lift_to_drag) {
  if (!(beta > 0.0)) throw ModelError("ballistic coefficient must be positive");
  VehicleModel v;
  v.mass = mass;
  v.area = area;
  v.cd0 = mass / (beta * area);
  v.cl0 = lift_to_drag * v.cd0;
  v.validate();
  return v;
}

double atmospheric_density(double h, const PlanetModel& planet, double drho_frac) {
  return (1.0 + drho_frac) * planet.rho0 * std::exp(-h / planet.h_s);
}

double gravity(double r, const PlanetModel& planet) {
  if (!(r > 0.0)) throw ModelError("gravity: radial position must be positive");
  return planet.mu / (r * r);
}

AeroAccels aero_accels(double rho, double v, const VehicleModel& vehicle,
                       const DispersionSet& disp) {
  const double m = vehicle.mass * (1.0 + disp.mass);
  if (!(m > 0.0)) throw ModelError("aero_accels: dispersed mass must be positive");
  const double q_over_m = 0.5 * rho * v * v * vehicle.area / m;
  return {q_over_m * vehicle.cl0 * (1.0 + disp.cl), q_over_m * vehicle.cd0 * (1.0 + disp.cd)};
}

}  // namespace entry
