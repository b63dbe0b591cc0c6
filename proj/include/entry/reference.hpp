#pragma once

// Time-indexed reference drag profile D*(t) with first and second
// derivatives, and the open-loop generator that produces it.

#include <optional>
#include <string>
#include <vector>

#include "entry/models.hpp"

namespace entry {

/// Open-loop bank magnitude schedule. The two-segment family blends linearly
/// from sigma1 to sigma2 over [t_switch, t_switch + ramp].
struct BankSchedule {
  enum class Kind { constant, two_segment };

  Kind kind = Kind::constant;
  double sigma1 = 0.0;  // rad
  double sigma2 = 0.0;  // rad
  double t_switch = 0.0;
  double ramp = 0.0;

  static BankSchedule constant(double sigma);
  static BankSchedule two_segment(double sigma1, double sigma2, double t_switch, double ramp);

  double operator()(double t) const;
  std::string describe() const;
};

struct TerminalConditions {
  double altitude = 10.0e3;  // m
  double velocity = 503.0;   // m/s
};

struct ReferenceSample {
  double dstar = 0.0;
  double dstar_dot = 0.0;
  double dstar_ddot = 0.0;
};

/// Immutable sampled profile. Between knots the drag is a quintic Hermite
/// polynomial matching value, slope and curvature at both ends, so the three
/// returned signals are exact derivatives of one C2 function. Outside the
/// knot range the end value is held and both derivatives are zero.
class ReferenceProfile {
 public:
  ReferenceProfile(std::vector<double> t, std::vector<double> dstar,
                   std::vector<double> dstar_dot, std::vector<double> dstar_ddot,
                   double s_target, TerminalConditions terminal, BankSchedule schedule = {});

  /// D*(t) = c on [t0, t1].
  static ReferenceProfile constant(double c, double t0, double t1, double s_target = 1.0);

  ReferenceSample sample(double t) const;

  /// First time at which D* reaches `drag`, or nullopt if it never does.
  std::optional<double> time_at_drag(double drag) const;

  const std::vector<double>& knots() const { return t_; }
  const std::vector<double>& dstar() const { return d_; }
  const std::vector<double>& dstar_dot() const { return dd_; }
  const std::vector<double>& dstar_ddot() const { return ddd_; }
  double s_target() const { return s_target_; }
  const TerminalConditions& terminal() const { return terminal_; }
  const BankSchedule& schedule() const { return schedule_; }
  double start_time() const { return t_.front(); }
  double end_time() const { return t_.back(); }

 private:
  std::vector<double> t_, d_, dd_, ddd_;
  double s_target_;
  TerminalConditions terminal_;
  BankSchedule schedule_;
};

struct RunConfig;

struct RefgenOptions {
  enum class Family { constant, two_segment };

  Family family = Family::constant;
  double target_downrange = 723.32e3;  // m
  double target_altitude = 10.0e3;     // m, used by the two-segment family
  double t_switch = 90.0;
  double ramp = 10.0;
  int max_iterations = 60;
};

struct RefgenResult {
  ReferenceProfile profile;
  BankSchedule schedule;
  double achieved_downrange = 0.0;
  double achieved_altitude = 0.0;
  double achieved_velocity = 0.0;
  double flight_time = 0.0;
  bool two_segment_converged = false;
};

class ReferenceGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tunes an open-loop bank schedule on the nominal world and records the
/// resulting drag history as the reference. A constant bank is first found
/// by bisection on downrange; the two-segment family then refines
/// (sigma1, sigma2) by Newton iteration on (downrange, terminal altitude),
/// falling back to the constant bank if it does not converge.
RefgenResult generate_reference(const RunConfig& nominal, const RefgenOptions& opts);

/// Records the open-loop run of `schedule` as a profile.
RefgenResult record_reference(const RunConfig& nominal, const BankSchedule& schedule);

}  // namespace entry
