#pragma once

// Closed-loop entry simulation: fixed-step RK4 on the truth plant, downrange
// and observer, with the bank command zero-order held over each step.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "entry/drag_chain.hpp"
#include "entry/dynamics.hpp"
#include "entry/guidance.hpp"
#include "entry/models.hpp"
#include "entry/reference.hpp"

namespace entry {

enum class GuidanceMode { open_loop, state_feedback, output_feedback };

std::string to_string(GuidanceMode mode);
GuidanceMode parse_mode(const std::string& text);

struct RunConfig {
  GuidanceMode mode = GuidanceMode::output_feedback;
  double dt = 0.05;
  double max_time = 2000.0;
  double t0 = 0.0;  // reference time of the initial state
  // When positive, guidance stays idle (bank held) until the measured drag
  // first reaches this level (m/s^2); the reference clock is then aligned so
  // that D*(t_ref) equals the measured drag at that instant.
  double trigger_drag = 0.0;

  PlanetModel planet;
  VehicleModel vehicle;
  DispersionSet dispersions;
  GuidanceConfig guidance;
  std::shared_ptr<const ReferenceProfile> reference;
  BankSchedule open_loop_bank;  // used in open_loop mode

  EntryState initial;
  TerminalConditions terminal;  // altitude used only when no reference is set

  double drag_noise_std = 0.0;  // m/s^2, additive Gaussian on measured drag
  std::uint64_t seed = 0;

  std::optional<ObserverState> observer_init;  // default: (x1(0), 0)

  void validate() const;
};

struct TrajectoryRecord {
  double t = 0.0;
  double t_ref = 0.0;  // reference-profile time
  EntryState state;
  double h = 0.0;
  double s = 0.0;  // downrange, m
  double drag = 0.0;
  double dstar = 0.0;
  double dstar_dot = 0.0;
  double dstar_ddot = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;  // onboard Ddot - Ddot*
  double drag_rate = 0.0;
  double sigma = 0.0;
  double u_raw = 0.0;
  double u = 0.0;
  bool saturated = false;
  bool held = false;
  double xhat1 = 0.0;
  double xhat2 = 0.0;
  double f = 0.0;
  double g0 = 0.0;
  double energy = 0.0;
};

struct TrajectoryLog {
  std::vector<TrajectoryRecord> records;
  double dt = 0.0;
};

struct RunSummary {
  bool terminated = false;  // reached the terminal velocity before max_time
  double t_final = 0.0;
  EntryState final_state;
  double h_final = 0.0;
  double s_final = 0.0;
  double s_target = 0.0;
  double h_target = 0.0;
  double downrange_error = 0.0;  // m
  double altitude_error = 0.0;   // m
  double saturation_fraction = 0.0;
  double hold_fraction = 0.0;
  double max_abs_x1_after_transient = 0.0;
  std::optional<double> trigger_time;  // when the reference clock started
  std::size_t steps = 0;
};

struct RunResult {
  TrajectoryLog log;
  RunSummary summary;
};

/// Runs one entry. Domain violations are rethrown as DomainError carrying the
/// offending time, non-finite derivatives as NonFiniteError with the step.
RunResult run_closed_loop(const RunConfig& cfg);

/// Columns of a log needed by delta_diagnostic.
DragHistory drag_history(const TrajectoryLog& log);

/// Index of the first record after the initial hold/saturation episode, or
/// the record count if the command never leaves it.
std::size_t transient_end(const TrajectoryLog& log);

}  // namespace entry
