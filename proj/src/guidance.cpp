#include "entry/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "entry/integrator.hpp"

namespace entry {

void GuidanceConfig::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(eps0 > 0.0)) {
    throw std::invalid_argument("guidance: a, b and eps0 must be positive");
  }
  if (!(l1 > 0.0) || !(l2 > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("guidance: l1, l2 and eps must be positive");
  }
  if (!(g0_floor >= 0.0)) throw std::invalid_argument("guidance: g0_floor must be non-negative");
  if (!(u_min >= -1.0 && u_min < u_max && u_max <= 1.0)) {
    throw std::invalid_argument("guidance: u limits must satisfy -1 <= u_min < u_max <= 1");
  }
}

std::optional<double> state_feedback_u(double x1, double x2, double f, double g0,
                                       double dstar_ddot, const GuidanceConfig& cfg) {
  if (!(std::abs(g0) >= cfg.g0_floor) || g0 == 0.0) return std::nullopt;
  return (-f + dstar_ddot - cfg.k1() * x1 - cfg.k2() * x2) / g0;
}

std::optional<double> output_feedback_u(double x1, double xhat2, double f, double g0,
                                        double dstar_ddot, const GuidanceConfig& cfg) {
  return state_feedback_u(x1, xhat2, f, g0, dstar_ddot, cfg);
}

ObserverState observer_rates(const ObserverState& obs, double x1, const GuidanceConfig& cfg) {
  const double innovation = x1 - obs.xhat1;
  return {obs.xhat2 + cfg.l1 / cfg.eps * innovation,
          -cfg.k1() * x1 - cfg.k2() * obs.xhat2 + cfg.l2 / (cfg.eps * cfg.eps) * innovation};
}

ObserverState observer_step(const ObserverState& obs, double x1_meas, const GuidanceConfig& cfg,
                            double dt) {
  const Eigen::Vector2d x0(obs.xhat1, obs.xhat2);
  const auto rhs = [&](double, const Eigen::Vector2d& x) {
    const ObserverState r = observer_rates({x[0], x[1]}, x1_meas, cfg);
    return Eigen::Vector2d(r.xhat1, r.xhat2);
  };
  const Eigen::Vector2d x1 = rk4_step(rhs, 0.0, x0, dt);
  return {x1[0], x1[1]};
}

BankCommand saturate_and_bank(double u_raw, double u_min, double u_max) {
  BankCommand c;
  c.u_raw = u_raw;
  c.u = std::clamp(u_raw, u_min, u_max);
  c.saturated = c.u != u_raw;
  c.sigma = std::acos(c.u);
  return c;
}

BankGuidance::BankGuidance(GuidanceConfig cfg, double initial_sigma)
    : cfg_(cfg), last_sigma_(initial_sigma) {
  cfg_.validate();
}

BankCommand BankGuidance::command(double x1, double rate_feedback, double f, double g0,
                                  double dstar_ddot) {
  const auto u_raw = state_feedback_u(x1, rate_feedback, f, g0, dstar_ddot, cfg_);
  if (!u_raw) {
    BankCommand held;
    held.sigma = last_sigma_;
    held.u = std::cos(last_sigma_);
    held.u_raw = held.u;
    held.held = true;
    return held;
  }
  BankCommand c = saturate_and_bank(*u_raw, cfg_.u_min, cfg_.u_max);
  last_sigma_ = c.sigma;
  return c;
}

}  // namespace entry
