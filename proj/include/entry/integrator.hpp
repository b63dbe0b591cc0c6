#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

namespace entry {

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(double x) { return std::isfinite(x); }

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.allFinite();
}

/// Classical fixed-step fourth-order Runge-Kutta. `rhs(t, x)` returns dx/dt.
/// Throws NonFiniteError if any stage derivative is not finite.
template <typename State, typename Rhs>
State rk4_step(Rhs&& rhs, double t, const State& x, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
  const double half = 0.5 * dt;
  const auto check = [](const State& k) -> const State& {
    if (!all_finite(k)) throw NonFiniteError("rk4_step: non-finite derivative");
    return k;
  };
  const State k1 = check(rhs(t, x));
  const State k2 = check(rhs(t + half, State(x + half * k1)));
  const State k3 = check(rhs(t + half, State(x + half * k2)));
  const State k4 = check(rhs(t + dt, State(x + dt * k3)));
  return State(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace entry
