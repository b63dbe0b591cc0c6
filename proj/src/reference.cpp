#include "entry/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "entry/sim.hpp"

namespace entry {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

BankSchedule BankSchedule::constant(double sigma) {
  BankSchedule b;
  b.kind = Kind::constant;
  b.sigma1 = sigma;
  b.sigma2 = sigma;
  return b;
}

BankSchedule BankSchedule::two_segment(double sigma1, double sigma2, double t_switch, double ramp) {
  BankSchedule b;
  b.kind = Kind::two_segment;
  b.sigma1 = sigma1;
  b.sigma2 = sigma2;
  b.t_switch = t_switch;
  b.ramp = ramp;
  return b;
}

double BankSchedule::operator()(double t) const {
  if (kind == Kind::constant || t <= t_switch) return sigma1;
  if (ramp <= 0.0 || t >= t_switch + ramp) return sigma2;
  const double w = (t - t_switch) / ramp;
  return sigma1 + w * (sigma2 - sigma1);
}

std::string BankSchedule::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::constant) {
    os << "constant sigma1_deg=" << sigma1 / kDeg;
  } else {
    os << "two_segment sigma1_deg=" << sigma1 / kDeg << " sigma2_deg=" << sigma2 / kDeg
       << " t_switch_s=" << t_switch << " ramp_s=" << ramp;
  }
  return os.str();
}

ReferenceProfile::ReferenceProfile(std::vector<double> t, std::vector<double> dstar,
                                   std::vector<double> dstar_dot, std::vector<double> dstar_ddot,
                                   double s_target, TerminalConditions terminal,
                                   BankSchedule schedule)
    : t_(std::move(t)),
      d_(std::move(dstar)),
      dd_(std::move(dstar_dot)),
      ddd_(std::move(dstar_ddot)),
      s_target_(s_target),
      terminal_(terminal),
      schedule_(schedule) {
  const std::size_t n = t_.size();
  if (n < 2) throw std::invalid_argument("reference profile: need at least two knots");
  if (d_.size() != n || dd_.size() != n || ddd_.size() != n) {
    throw std::invalid_argument("reference profile: column lengths differ");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(t_[i] > t_[i - 1])) {
      throw std::invalid_argument("reference profile: knots must be strictly increasing");
    }
  }
  if (!(s_target_ > 0.0)) throw std::invalid_argument("reference profile: s_target must be positive");
}

ReferenceProfile ReferenceProfile::constant(double c, double t0, double t1, double s_target) {
  return ReferenceProfile({t0, t1}, {c, c}, {0.0, 0.0}, {0.0, 0.0}, s_target, {});
}

ReferenceSample ReferenceProfile::sample(double t) const {
  if (t <= t_.front()) return {d_.front(), t == t_.front() ? dd_.front() : 0.0,
                               t == t_.front() ? ddd_.front() : 0.0};
  if (t >= t_.back()) return {d_.back(), t == t_.back() ? dd_.back() : 0.0,
                              t == t_.back() ? ddd_.back() : 0.0};

  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;

  // Quintic in s matching value, slope and curvature at both knots.
  const double c0 = d_[i];
  const double c1 = h * dd_[i];
  const double c2 = 0.5 * h * h * ddd_[i];
  const double p = d_[i + 1] - (c0 + c1 + c2);
  const double m = h * dd_[i + 1] - (c1 + 2.0 * c2);
  const double a = h * h * ddd_[i + 1] - 2.0 * c2;
  const double c3 = 10.0 * p - 4.0 * m + 0.5 * a;
  const double c4 = -15.0 * p + 7.0 * m - a;
  const double c5 = 6.0 * p - 3.0 * m + 0.5 * a;

  const double value = c0 + s * (c1 + s * (c2 + s * (c3 + s * (c4 + s * c5))));
  const double d1 = c1 + s * (2.0 * c2 + s * (3.0 * c3 + s * (4.0 * c4 + s * 5.0 * c5)));
  const double d2 = 2.0 * c2 + s * (6.0 * c3 + s * (12.0 * c4 + s * 20.0 * c5));
  return {value, d1 / h, d2 / (h * h)};
}

std::optional<double> ReferenceProfile::time_at_drag(double drag) const {
  if (d_.front() >= drag) return t_.front();
  for (std::size_t i = 1; i < t_.size(); ++i) {
    if (d_[i] < drag) continue;
    // Bisection on the interpolant inside [t_{i-1}, t_i].
    double lo = t_[i - 1];
    double hi = t_[i];
    for (int it = 0; it < 80 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (sample(mid).dstar < drag) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return hi;
  }
  return std::nullopt;
}

RefgenResult record_reference(const RunConfig& nominal, const BankSchedule& schedule) {
  if (!nominal.dispersions.is_nominal()) {
    throw ReferenceGenerationError("reference generation needs the zero-dispersion world");
  }
  RunConfig cfg = nominal;
  cfg.mode = GuidanceMode::open_loop;
  cfg.open_loop_bank = schedule;
  cfg.reference.reset();
  cfg.drag_noise_std = 0.0;

  const RunResult run = run_closed_loop(cfg);
  if (!run.summary.terminated) {
    throw ReferenceGenerationError("bank schedule (" + schedule.describe() +
                                   ") never reached the terminal velocity within max_time");
  }

  const auto& recs = run.log.records;
  std::vector<double> t, d, dd, ddd;
  t.reserve(recs.size());
  d.reserve(recs.size());
  dd.reserve(recs.size());
  ddd.reserve(recs.size());
  for (const auto& r : recs) {
    // The final event record can fall within rounding of the previous knot.
    if (!t.empty() && !(r.t > t.back() + 1e-9)) continue;
    t.push_back(r.t);
    d.push_back(r.drag);
    dd.push_back(r.drag_rate);
    ddd.push_back(r.f + r.g0 * r.u);
  }

  const RunSummary& s = run.summary;
  TerminalConditions term{s.h_final, s.final_state.v};
  return RefgenResult{ReferenceProfile(std::move(t), std::move(d), std::move(dd), std::move(ddd),
                                       s.s_final, term, schedule),
                      schedule,
                      s.s_final,
                      s.h_final,
                      s.final_state.v,
                      s.t_final - cfg.t0,
                      false};
}

namespace {

struct Outcome {
  double downrange;
  double altitude;
};

Outcome fly(const RunConfig& nominal, const BankSchedule& schedule) {
  RunConfig cfg = nominal;
  cfg.mode = GuidanceMode::open_loop;
  cfg.open_loop_bank = schedule;
  cfg.reference.reset();
  const RunResult run = run_closed_loop(cfg);
  if (!run.summary.terminated) {
    throw ReferenceGenerationError("bank schedule (" + schedule.describe() +
                                   ") never reached the terminal velocity within max_time");
  }
  return {run.summary.s_final, run.summary.h_final};
}

}  // namespace

RefgenResult generate_reference(const RunConfig& nominal, const RefgenOptions& opts) {
  if (!nominal.dispersions.is_nominal()) {
    throw ReferenceGenerationError("reference generation needs the zero-dispersion world");
  }

  // Downrange falls monotonically as the bank opens from full lift up.
  double lo = 0.0;
  double hi = std::numbers::pi;
  const double s_lo = fly(nominal, BankSchedule::constant(lo)).downrange;
  const double s_hi = fly(nominal, BankSchedule::constant(hi)).downrange;
  if (opts.target_downrange > s_lo || opts.target_downrange < s_hi) {
    std::ostringstream os;
    os << "target downrange " << opts.target_downrange << " m is outside the reachable range ["
       << s_hi << ", " << s_lo << "] m for constant bank";
    throw ReferenceGenerationError(os.str());
  }
  for (int it = 0; it < opts.max_iterations && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fly(nominal, BankSchedule::constant(mid)).downrange > opts.target_downrange) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const BankSchedule constant = BankSchedule::constant(0.5 * (lo + hi));
  if (opts.family == RefgenOptions::Family::constant) return record_reference(nominal, constant);

  // Newton on (sigma1, sigma2) for (downrange, altitude), scaled to km.
  Eigen::Vector2d sig(constant.sigma1, constant.sigma1);
  const Eigen::Vector2d target(opts.target_downrange / 1e3, opts.target_altitude / 1e3);
  const auto residual = [&](const Eigen::Vector2d& x) {
    const Outcome o =
        fly(nominal, BankSchedule::two_segment(x[0], x[1], opts.t_switch, opts.ramp));
    return Eigen::Vector2d(Eigen::Vector2d(o.downrange / 1e3, o.altitude / 1e3) - target);
  };
  const double lower = 2.0 * kDeg;
  const double upper = 178.0 * kDeg;
  bool converged = false;
  try {
    Eigen::Vector2d res = residual(sig);
    for (int it = 0; it < 30; ++it) {
      if (std::abs(res[0]) < 1e-4 && std::abs(res[1]) < 1e-4) {
        converged = true;
        break;
      }
      Eigen::Matrix2d jac;
      const double step = 1e-4;
      for (int j = 0; j < 2; ++j) {
        Eigen::Vector2d xp = sig;
        xp[j] += step;
        jac.col(j) = (residual(xp) - res) / step;
      }
      if (std::abs(jac.determinant()) < 1e-12) break;
      Eigen::Vector2d delta = -jac.partialPivLu().solve(res);
      const double max_step = 10.0 * kDeg;
      if (delta.cwiseAbs().maxCoeff() > max_step) delta *= max_step / delta.cwiseAbs().maxCoeff();
      sig = (sig + delta).cwiseMax(lower).cwiseMin(upper);
      res = residual(sig);
    }
  } catch (const ReferenceGenerationError&) {
    converged = false;
  }
  if (!converged) return record_reference(nominal, constant);

  RefgenResult out =
      record_reference(nominal, BankSchedule::two_segment(sig[0], sig[1], opts.t_switch, opts.ramp));
  out.two_segment_converged = true;
  return out;
}

}  // namespace entry
