#pragma once

// Bank-angle magnitude guidance for drag tracking: the state-feedback law,
// its output-feedback variant driven by a high-gain observer, and the
// u = cos(sigma) command shaping.

#include <optional>

namespace entry {

struct GuidanceConfig {
  // Tracking-error dynamics gains.
  double a = 1.982;
  double b = 3.0;
  double eps0 = 5.0;
  // High-gain observer.
  double l1 = 2.0;
  double l2 = 1.0;
  double eps = 0.481;
  // Below this |g0| (m/s^4) the law is not inverted and the last bank is held.
  double g0_floor = 1e-5;
  double u_min = -1.0;
  double u_max = 1.0;

  void validate() const;

  double k1() const { return a / (eps0 * eps0); }
  double k2() const { return b / eps0; }
};

/// x1 = D - D*, x2 = Ddot - Ddot*.
struct TrackingState {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct ObserverState {
  double xhat1 = 0.0;
  double xhat2 = 0.0;
};

struct BankCommand {
  double u_raw = 0.0;
  double u = 0.0;
  double sigma = 0.0;  // rad in [0, pi]
  bool saturated = false;
  bool held = false;  // |g0| under the floor, previous bank kept
};

/// u_raw = (-f + Dstar_ddot - a/eps0^2 x1 - b/eps0 x2) / g0, unclamped.
/// Returns nullopt when |g0| is below the floor.
std::optional<double> state_feedback_u(double x1, double x2, double f, double g0,
                                       double dstar_ddot, const GuidanceConfig& cfg);

/// Same law with the observer estimate in place of x2.
std::optional<double> output_feedback_u(double x1, double xhat2, double f, double g0,
                                        double dstar_ddot, const GuidanceConfig& cfg);

/// Observer right-hand side for a measured x1.
ObserverState observer_rates(const ObserverState& obs, double x1, const GuidanceConfig& cfg);

/// One RK4 step of the observer with x1 held over the step.
ObserverState observer_step(const ObserverState& obs, double x1_meas, const GuidanceConfig& cfg,
                            double dt);

/// Clamp to [-1, 1] and convert to a bank magnitude sigma = acos(u).
BankCommand saturate_and_bank(double u_raw, double u_min = -1.0, double u_max = 1.0);

/// Stateful wrapper applying the hold-on-singularity rule. The initial held
/// bank is 0 (full lift up).
class BankGuidance {
 public:
  explicit BankGuidance(GuidanceConfig cfg, double initial_sigma = 0.0);

  /// `rate_feedback` is x2 (state feedback) or xhat2 (output feedback).
  BankCommand command(double x1, double rate_feedback, double f, double g0, double dstar_ddot);

  const GuidanceConfig& config() const { return cfg_; }
  double last_sigma() const { return last_sigma_; }

 private:
  GuidanceConfig cfg_;
  double last_sigma_;
};

}  // namespace entry
