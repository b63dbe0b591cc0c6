#pragma once

// Onboard drag dynamics: Ddot = D * (rho'/rho + 2 v'/v + C) and the
// second-order decomposition Dddot = f + g0 * u + Delta with u = cos(sigma).
//
// Onboard evaluation uses nominal models and the measured drag. The
// unmodeled part (delta, Delta) is never computed onboard; it is only
// measured after the fact from a logged truth run by delta_diagnostic().

#include <span>
#include <vector>

#include "entry/dynamics.hpp"
#include "entry/models.hpp"

namespace entry {

struct DragChainTerms {
  double drag = 0.0;       // D, m/s^2
  double drag_rate = 0.0;  // Ddot, m/s^3
  double f = 0.0;          // drift, m/s^4
  double g0 = 0.0;         // control effectiveness, m/s^4 per unit u
  double c = 0.0;          // nominal Cd rate ratio, 1/s
  double delta = 0.0;      // diagnostic only, zero onboard
  double big_delta = 0.0;  // diagnostic only, zero onboard
};

struct DriftAndGain {
  double f = 0.0;
  double g0 = 0.0;

  bool invertible(double floor) const;
};

/// Ddot = D * (-v sin(gamma)/h_s - 2D/v - 2 g sin(gamma)/v + c).
/// `c` is the nominal drag-coefficient rate ratio; constant coefficients give 0.
double drag_rate(double drag, const EntryState& s, const PlanetModel& planet, double c = 0.0);

/// Drift f and control gain g0 of the drag second derivative. `lift` is the
/// onboard lift acceleration. `c_dot` is the time derivative of `c`.
DriftAndGain f_and_g0(double drag, const EntryState& s, double lift, const PlanetModel& planet,
                      double c = 0.0, double c_dot = 0.0);

/// The drift term transcribed literally from the published expression. Kept
/// only as a cross-check: its v^2 cos^2(gamma)/(r h_s) term carries the
/// opposite sign to the one obtained by differentiating Ddot along the
/// equations of motion, so the two differ by 2 D v^2 cos^2(gamma)/(r h_s).
double f_published(double drag, const EntryState& s, const PlanetModel& planet, double c = 0.0,
                   double c_dot = 0.0);

/// All onboard terms at a measured state. Lift is reconstructed from the
/// measured drag and the nominal L/D.
DragChainTerms onboard_terms(double measured_drag, const EntryState& s,
                             const PlanetModel& planet, const VehicleModel& vehicle);

/// Uniformly sampled drag history of a logged run, used to measure Delta.
struct DragHistory {
  std::vector<double> t;
  std::vector<double> drag;
  std::vector<double> u;  // command applied on [t_k, t_k+1)
  std::vector<double> f;
  std::vector<double> g0;
  std::vector<double> x1;
};

struct DeltaSample {
  double t = 0.0;
  double x1 = 0.0;
  double delta = 0.0;  // Dddot_numeric - f - g0 * u
};

/// Measures Delta(t) = Dddot - f - g0 u from second differences of the
/// logged drag. The command is zero-order held, so the centered difference at
/// t_k pairs with the mean of u_{k-1} and u_k. Throws std::invalid_argument
/// when the stride exceeds `max_dt` or fewer than three uniform samples exist.
std::vector<DeltaSample> delta_diagnostic(const DragHistory& history, double max_dt = 0.1);

}  // namespace entry
