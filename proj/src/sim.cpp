#include "entry/sim.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>

#include "entry/integrator.hpp"

namespace entry {

namespace {

// [r, lon, lat, v, gamma, chi, downrange, xhat1, xhat2]
using Augmented = Eigen::Matrix<double, 9, 1>;

EntryState unpack(const Augmented& x) { return {x[0], x[1], x[2], x[3], x[4], x[5]}; }

Augmented pack(const EntryState& s, double downrange, const ObserverState& obs) {
  Augmented x;
  x << s.r, s.lon, s.lat, s.v, s.gamma, s.chi, downrange, obs.xhat1, obs.xhat2;
  return x;
}

double truth_drag(const EntryState& s, const RunConfig& cfg) {
  const double rho = atmospheric_density(cfg.planet.altitude(s.r), cfg.planet, cfg.dispersions.density);
  return aero_accels(rho, s.v, cfg.vehicle, cfg.dispersions).drag;
}

ReferenceSample reference_at(const RunConfig& cfg, double t) {
  return cfg.reference ? cfg.reference->sample(t) : ReferenceSample{};
}

std::string at_time(double t) {
  std::ostringstream os;
  os << " (t = " << t << " s)";
  return os.str();
}

}  // namespace

std::string to_string(GuidanceMode mode) {
  switch (mode) {
    case GuidanceMode::open_loop: return "open-loop-nominal";
    case GuidanceMode::state_feedback: return "state-feedback";
    case GuidanceMode::output_feedback: return "output-feedback";
  }
  return "unknown";
}

GuidanceMode parse_mode(const std::string& text) {
  if (text == "open-loop-nominal" || text == "open-loop") return GuidanceMode::open_loop;
  if (text == "state-feedback") return GuidanceMode::state_feedback;
  if (text == "output-feedback") return GuidanceMode::output_feedback;
  throw std::invalid_argument("unknown guidance mode '" + text +
                              "' (expected open-loop-nominal, state-feedback or output-feedback)");
}

void RunConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("run config: dt must be positive");
  if (!(max_time > 0.0)) throw std::invalid_argument("run config: max_time must be positive");
  if (!(terminal.velocity > 0.0)) {
    throw std::invalid_argument("run config: terminal velocity must be positive");
  }
  if (!(drag_noise_std >= 0.0)) {
    throw std::invalid_argument("run config: drag noise std must be non-negative");
  }
  planet.validate();
  vehicle.validate();
  guidance.validate();
  check_domain(initial);
  if (!(trigger_drag >= 0.0)) {
    throw std::invalid_argument("run config: trigger drag must be non-negative");
  }
  if (mode != GuidanceMode::open_loop && !reference) {
    throw std::invalid_argument("run config: " + to_string(mode) + " needs a reference profile");
  }
}

RunResult run_closed_loop(const RunConfig& cfg) {
  cfg.validate();

  RunResult result;
  TrajectoryLog& log = result.log;
  log.dt = cfg.dt;
  const auto max_steps = static_cast<std::size_t>(std::ceil(cfg.max_time / cfg.dt));
  log.records.reserve(std::min<std::size_t>(max_steps + 2, 1u << 16));

  std::mt19937_64 noise_rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const bool noisy = cfg.drag_noise_std > 0.0;

  BankGuidance guidance(cfg.guidance);
  const bool observe = cfg.mode == GuidanceMode::output_feedback;

  EntryState state = cfg.initial;
  double downrange = 0.0;
  ObserverState obs;
  {
    const double x1 = truth_drag(state, cfg) - reference_at(cfg, cfg.t0).dstar;
    obs = cfg.observer_init.value_or(ObserverState{cfg.reference ? x1 : 0.0, 0.0});
  }

  // Reference time is t + ref_offset once the clock has started.
  const bool triggered = cfg.trigger_drag > 0.0 && cfg.mode != GuidanceMode::open_loop;
  bool active = !triggered;
  double ref_offset = 0.0;

  // Builds the record at the current state. The command fields are filled by
  // the caller.
  const auto measure = [&](double t, const EntryState& s, double drag_meas, double sdist,
                           const ObserverState& o) {
    TrajectoryRecord rec;
    rec.t = t;
    rec.t_ref = t + ref_offset;
    rec.state = s;
    rec.h = cfg.planet.altitude(s.r);
    rec.s = sdist;
    rec.drag = drag_meas;
    const ReferenceSample ref = reference_at(cfg, t + ref_offset);
    rec.dstar = ref.dstar;
    rec.dstar_dot = ref.dstar_dot;
    rec.dstar_ddot = ref.dstar_ddot;
    const DragChainTerms terms = onboard_terms(drag_meas, s, cfg.planet, cfg.vehicle);
    rec.drag_rate = terms.drag_rate;
    rec.f = terms.f;
    rec.g0 = terms.g0;
    if (cfg.reference) {
      rec.x1 = drag_meas - ref.dstar;
      rec.x2 = terms.drag_rate - ref.dstar_dot;
    }
    rec.xhat1 = o.xhat1;
    rec.xhat2 = o.xhat2;
    rec.energy = specific_energy(s, cfg.planet);
    return rec;
  };

  double t = cfg.t0;
  const double t_end = cfg.t0 + cfg.max_time;
  std::size_t step = 0;
  std::size_t saturated_steps = 0;
  std::size_t held_steps = 0;
  bool terminated = false;
  std::optional<double> sum_trigger;

  while (true) {
    const double noise_sample = noisy ? cfg.drag_noise_std * noise(noise_rng) : 0.0;
    TrajectoryRecord rec;
    try {
      const double drag_meas = truth_drag(state, cfg) + noise_sample;
      if (!active && drag_meas >= cfg.trigger_drag) {
        const auto t_ref = cfg.reference->time_at_drag(drag_meas);
        if (!t_ref) {
          throw std::runtime_error("reference drag never reaches the trigger level" + at_time(t));
        }
        active = true;
        ref_offset = *t_ref - t;
        sum_trigger = t;
        obs = {drag_meas - cfg.reference->sample(*t_ref).dstar, 0.0};
      }
      rec = measure(t, state, drag_meas, downrange, obs);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + at_time(t));
    }

    BankCommand cmd;
    if (!active) {
      cmd.u_raw = 1.0;
      cmd.u = 1.0;
      cmd.sigma = 0.0;
      cmd.held = true;
    } else if (cfg.mode == GuidanceMode::open_loop) {
      cmd.sigma = cfg.open_loop_bank(t);
      cmd.u = std::cos(cmd.sigma);
      cmd.u_raw = cmd.u;
    } else {
      const double rate = cfg.mode == GuidanceMode::state_feedback ? rec.x2 : obs.xhat2;
      cmd = guidance.command(rec.x1, rate, rec.f, rec.g0, rec.dstar_ddot);
    }
    if (!std::isfinite(cmd.u_raw)) {
      throw NonFiniteError("guidance produced a non-finite command at step " +
                           std::to_string(step) + at_time(t));
    }
    rec.sigma = cmd.sigma;
    rec.u_raw = cmd.u_raw;
    rec.u = cmd.u;
    rec.saturated = cmd.saturated;
    rec.held = cmd.held;
    saturated_steps += cmd.saturated ? 1 : 0;
    held_steps += cmd.held ? 1 : 0;
    log.records.push_back(rec);

    if (t >= t_end - 0.5 * cfg.dt) break;

    const double sigma = cmd.sigma;
    const auto rhs = [&](double tau, const Augmented& x) {
      const EntryState s = unpack(x);
      const StateDerivative d = eom_rhs(s, sigma, cfg.planet, cfg.vehicle, cfg.dispersions);
      Augmented dx;
      dx[0] = d.r;
      dx[1] = d.lon;
      dx[2] = d.lat;
      dx[3] = d.v;
      dx[4] = d.gamma;
      dx[5] = d.chi;
      dx[6] = downrange_rate(s);
      if (observe && active) {
        const double x1 =
            truth_drag(s, cfg) + noise_sample - reference_at(cfg, tau + ref_offset).dstar;
        const ObserverState r = observer_rates({x[7], x[8]}, x1, cfg.guidance);
        dx[7] = r.xhat1;
        dx[8] = r.xhat2;
      } else {
        dx[7] = 0.0;
        dx[8] = 0.0;
      }
      return dx;
    };

    const Augmented x0 = pack(state, downrange, obs);
    Augmented x1;
    try {
      x1 = rk4_step(rhs, t, x0, cfg.dt);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + at_time(t));
    } catch (const NonFiniteError&) {
      throw NonFiniteError("non-finite derivative at step " + std::to_string(step) + at_time(t));
    }
    ++step;

    if (x1[3] <= cfg.terminal.velocity) {
      // Linear interpolation to the terminal velocity inside the step.
      const double v0 = x0[3];
      const double alpha = (v0 - cfg.terminal.velocity) / (v0 - x1[3]);
      Augmented xf = x0 + alpha * (x1 - x0);
      xf[3] = cfg.terminal.velocity;
      const double tf = t + alpha * cfg.dt;
      EntryState sf = unpack(xf);
      normalize_angles(sf);
      const ObserverState of{xf[7], xf[8]};
      TrajectoryRecord last;
      try {
        last = measure(tf, sf, truth_drag(sf, cfg) + noise_sample, xf[6], of);
      } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + at_time(tf));
      }
      last.sigma = cmd.sigma;
      last.u_raw = cmd.u_raw;
      last.u = cmd.u;
      last.saturated = cmd.saturated;
      last.held = cmd.held;
      log.records.push_back(last);
      terminated = true;
      break;
    }

    state = unpack(x1);
    normalize_angles(state);
    downrange = x1[6];
    obs = {x1[7], x1[8]};
    t = cfg.t0 + static_cast<double>(step) * cfg.dt;
  }

  RunSummary& sum = result.summary;
  const TrajectoryRecord& last = log.records.back();
  sum.terminated = terminated;
  sum.t_final = last.t;
  sum.final_state = last.state;
  sum.h_final = last.h;
  sum.s_final = last.s;
  sum.s_target = cfg.reference ? cfg.reference->s_target() : 0.0;
  sum.h_target = cfg.reference ? cfg.reference->terminal().altitude : cfg.terminal.altitude;
  sum.downrange_error = sum.s_final - sum.s_target;
  sum.altitude_error = sum.h_final - sum.h_target;
  const double n = static_cast<double>(log.records.size());
  sum.saturation_fraction = static_cast<double>(saturated_steps) / n;
  sum.hold_fraction = static_cast<double>(held_steps) / n;
  sum.steps = step;
  sum.trigger_time = triggered ? sum_trigger : std::optional<double>(cfg.t0);
  for (std::size_t i = transient_end(log); i < log.records.size(); ++i) {
    sum.max_abs_x1_after_transient =
        std::max(sum.max_abs_x1_after_transient, std::abs(log.records[i].x1));
  }
  return result;
}

DragHistory drag_history(const TrajectoryLog& log) {
  DragHistory h;
  const std::size_t n = log.records.size();
  h.t.reserve(n);
  h.drag.reserve(n);
  h.u.reserve(n);
  h.f.reserve(n);
  h.g0.reserve(n);
  h.x1.reserve(n);
  for (const auto& r : log.records) {
    h.t.push_back(r.t);
    h.drag.push_back(r.drag);
    h.u.push_back(r.u);
    h.f.push_back(r.f);
    h.g0.push_back(r.g0);
    h.x1.push_back(r.x1);
  }
  return h;
}

std::size_t transient_end(const TrajectoryLog& log) {
  const auto& r = log.records;
  std::size_t i = 0;
  while (i < r.size() && r[i].held) ++i;
  while (i < r.size() && (r[i].saturated || r[i].held)) ++i;
  return i;
}

}  // namespace entry
