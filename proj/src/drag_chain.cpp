#include "entry/drag_chain.hpp"

#include <cmath>
#include <stdexcept>

namespace entry {

namespace {

struct Kinematics {
  double v, r, g, sg, cg;
};

Kinematics kinematics(const EntryState& s, const PlanetModel& planet) {
  if (!(s.v > 0.0)) throw ModelError("drag chain: speed must be positive");
  return {s.v, s.r, gravity(s.r, planet), std::sin(s.gamma), std::cos(s.gamma)};
}

// Log-derivative of drag, Ddot / D.
double drag_log_rate(double drag, const Kinematics& k, const PlanetModel& planet, double c) {
  return -k.v * k.sg / planet.h_s - 2.0 * drag / k.v - 2.0 * k.g * k.sg / k.v + c;
}

}  // namespace

bool DriftAndGain::invertible(double floor) const { return std::abs(g0) >= floor; }

double drag_rate(double drag, const EntryState& s, const PlanetModel& planet, double c) {
  const Kinematics k = kinematics(s, planet);
  return drag * drag_log_rate(drag, k, planet, c);
}

DriftAndGain f_and_g0(double drag, const EntryState& s, double lift, const PlanetModel& planet,
                      double c, double c_dot) {
  const Kinematics k = kinematics(s, planet);
  const double hs = planet.h_s;
  const double D = drag;
  const double v2 = k.v * k.v;
  const double s2 = k.sg * k.sg;
  const double c2 = k.cg * k.cg;

  const double log_rate = drag_log_rate(D, k, planet, c);
  const double ddot = D * log_rate;

  // Differentiating Ddot = D * G along the lift-free part of the equations
  // of motion; the L cos(sigma) part of gamma-dot is collected into g0.
  const double rest = (D * k.sg + k.g) / hs - v2 * c2 / (k.r * hs) +
                      (4.0 * k.g * s2 - 2.0 * k.g * c2) / k.r -
                      (2.0 * D * D + 4.0 * D * k.g * k.sg + 2.0 * k.g * k.g * s2 -
                       2.0 * k.g * k.g * c2) / v2 +
                      c_dot;

  DriftAndGain out;
  out.f = (log_rate - 2.0 * D / k.v) * ddot + D * rest;
  out.g0 = -(k.v / hs + 2.0 * k.g / k.v) * lift * D * k.cg / k.v;
  return out;
}

double f_published(double drag, const EntryState& s, const PlanetModel& planet, double c,
                   double c_dot) {
  const Kinematics k = kinematics(s, planet);
  const double hs = planet.h_s;
  const double D = drag;
  const double v2 = k.v * k.v;
  const double s2 = k.sg * k.sg;
  const double c2 = k.cg * k.cg;
  const double first = -k.v * k.sg / hs - 4.0 * D / k.v - 2.0 * k.g * k.sg / k.v + c;
  const double second = -k.v * k.sg / hs * D - 2.0 * D * D / k.v - 2.0 * k.g * k.sg / k.v * D + c * D;
  const double bracket = (D * k.sg + k.g) / hs + (4.0 * k.g * s2 - 2.0 * k.g * c2) / k.r -
                         (2.0 * D * D + 4.0 * D * k.g * k.sg + 2.0 * k.g * k.g * s2 -
                          2.0 * k.g * k.g * c2) / v2 +
                         v2 * c2 / (k.r * hs) + c_dot;
  return first * second + D * bracket;
}

DragChainTerms onboard_terms(double measured_drag, const EntryState& s,
                             const PlanetModel& planet, const VehicleModel& vehicle) {
  const double lift = measured_drag * vehicle.lift_to_drag();
  const auto fg = f_and_g0(measured_drag, s, lift, planet);
  DragChainTerms t;
  t.drag = measured_drag;
  t.drag_rate = drag_rate(measured_drag, s, planet);
  t.f = fg.f;
  t.g0 = fg.g0;
  return t;
}

std::vector<DeltaSample> delta_diagnostic(const DragHistory& h, double max_dt) {
  const std::size_t n = h.t.size();
  if (h.drag.size() != n || h.u.size() != n || h.f.size() != n || h.g0.size() != n ||
      h.x1.size() != n) {
    throw std::invalid_argument("delta_diagnostic: history columns differ in length");
  }
  if (n < 3) throw std::invalid_argument("delta_diagnostic: fewer than three samples");
  const double dt = h.t[1] - h.t[0];
  if (!(dt > 0.0)) throw std::invalid_argument("delta_diagnostic: time is not increasing");
  if (dt > max_dt) {
    throw std::invalid_argument("delta_diagnostic: log stride " + std::to_string(dt) +
                                " s is too coarse for second differences (max " +
                                std::to_string(max_dt) + " s)");
  }
  const auto uniform = [&](std::size_t i) {
    return std::abs((h.t[i + 1] - h.t[i]) - dt) <= 1e-9 * dt;
  };

  std::vector<DeltaSample> out;
  out.reserve(n);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (!uniform(k - 1) || !uniform(k)) continue;
    const double dd = (h.drag[k + 1] - 2.0 * h.drag[k] + h.drag[k - 1]) / (dt * dt);
    const double u = 0.5 * (h.u[k - 1] + h.u[k]);
    out.push_back({h.t[k], h.x1[k], dd - h.f[k] - h.g0[k] * u});
  }
  if (out.empty()) throw std::invalid_argument("delta_diagnostic: no uniformly spaced samples");
  return out;
}

}  // namespace entry
