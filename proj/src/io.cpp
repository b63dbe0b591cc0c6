#include "entry/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace entry {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string num(double x, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string magic(const std::string& kind) {
  return "# entry-guidance " + kind + " v" + std::to_string(kCsvVersion);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  return in;
}

void expect_magic(std::istream& in, const std::string& kind) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty " + kind + " file");
  const std::string prefix = "# entry-guidance " + kind + " v";
  if (line.rfind(prefix, 0) != 0) {
    throw FormatError("not an entry-guidance " + kind + " file (first line: '" + line + "')");
  }
  if (line.substr(prefix.size()) != std::to_string(kCsvVersion)) {
    throw FormatError("unsupported " + kind + " version '" + line.substr(prefix.size()) + "'");
  }
}

std::vector<double> split_numbers(const std::string& line, std::size_t expected) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos) {
        throw std::invalid_argument(cell);
      }
    } catch (const std::exception&) {
      throw FormatError("bad number '" + cell + "' in line '" + line + "'");
    }
  }
  if (out.size() != expected) {
    throw FormatError("expected " + std::to_string(expected) + " columns in line '" + line + "'");
  }
  return out;
}

std::map<std::string, std::string> parse_fields(const std::string& text) {
  std::map<std::string, std::string> fields;
  std::stringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      fields["kind"] = tok;
    } else {
      fields[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  return fields;
}

BankSchedule parse_schedule(const std::string& text) {
  auto f = parse_fields(text);
  const auto get = [&](const std::string& k) {
    if (!f.contains(k)) throw FormatError("bank_schedule is missing '" + k + "'");
    return std::stod(f[k]);
  };
  if (f["kind"] == "constant") return BankSchedule::constant(get("sigma1_deg") * kDeg);
  if (f["kind"] == "two_segment") {
    return BankSchedule::two_segment(get("sigma1_deg") * kDeg, get("sigma2_deg") * kDeg,
                                     get("t_switch_s"), get("ramp_s"));
  }
  throw FormatError("unknown bank_schedule kind '" + f["kind"] + "'");
}

nlohmann::ordered_json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json matrix_json(const Mat2& m) {
  return nlohmann::ordered_json::array({nlohmann::ordered_json::array({m(0, 0), m(0, 1)}),
                                        nlohmann::ordered_json::array({m(1, 0), m(1, 1)})});
}

nlohmann::ordered_json stats_json(const MetricStats& s) {
  nlohmann::ordered_json j;
  j["minimum"] = s.minimum / 1e3;
  j["maximum"] = s.maximum / 1e3;
  j["average"] = s.average / 1e3;
  j["standard_deviation"] = s.standard_deviation / 1e3;
  return j;
}

}  // namespace

void write_profile_csv(const ReferenceProfile& p, std::ostream& out) {
  out << magic("reference-profile") << '\n';
  out << "# s_target_m=" << num(p.s_target()) << '\n';
  out << "# terminal_altitude_m=" << num(p.terminal().altitude) << '\n';
  out << "# terminal_velocity_m_s=" << num(p.terminal().velocity) << '\n';
  out << "# bank_schedule=" << p.schedule().describe() << '\n';
  out << "t,Dstar,Dstar_dot,Dstar_ddot\n";
  for (std::size_t i = 0; i < p.knots().size(); ++i) {
    out << num(p.knots()[i]) << ',' << num(p.dstar()[i]) << ',' << num(p.dstar_dot()[i]) << ','
        << num(p.dstar_ddot()[i]) << '\n';
  }
}

void write_profile_csv(const ReferenceProfile& p, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_profile_csv(p, out);
}

ReferenceProfile read_profile_csv(std::istream& in) {
  expect_magic(in, "reference-profile");
  std::map<std::string, std::string> meta;
  std::string line;
  std::vector<double> t, d, dd, ddd;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const auto key = line.substr(2, eq - 2);
      meta[key] = line.substr(eq + 1);
      continue;
    }
    if (!header) {
      if (line != "t,Dstar,Dstar_dot,Dstar_ddot") {
        throw FormatError("unexpected reference-profile header '" + line + "'");
      }
      header = true;
      continue;
    }
    const auto v = split_numbers(line, 4);
    t.push_back(v[0]);
    d.push_back(v[1]);
    dd.push_back(v[2]);
    ddd.push_back(v[3]);
  }
  for (const char* k : {"s_target_m", "terminal_altitude_m", "terminal_velocity_m_s"}) {
    if (!meta.contains(k)) throw FormatError(std::string("reference profile is missing ") + k);
  }
  const BankSchedule schedule =
      meta.contains("bank_schedule") ? parse_schedule(meta["bank_schedule"]) : BankSchedule{};
  try {
    return ReferenceProfile(std::move(t), std::move(d), std::move(dd), std::move(ddd),
                            std::stod(meta["s_target_m"]),
                            {std::stod(meta["terminal_altitude_m"]),
                             std::stod(meta["terminal_velocity_m_s"])},
                            schedule);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid reference profile: ") + e.what());
  }
}

ReferenceProfile read_profile_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_profile_csv(in);
}

void write_log_csv(const TrajectoryLog& log, std::ostream& out) {
  out << magic("trajectory-log") << '\n';
  out << "# dt_s=" << num(log.dt) << '\n';
  out << "t,t_ref,r,lon,lat,v,gamma,chi,h,s,D,Dstar,Dstar_dot,Dstar_ddot,x1,x2,Ddot,sigma,u_raw,u,"
         "saturated,held,xhat1,xhat2,f,g0,energy\n";
  for (const auto& r : log.records) {
    const auto& s = r.state;
    out << num(r.t, 12) << ',' << num(r.t_ref, 12) << ',' << num(s.r, 12) << ',' << num(s.lon, 12) << ','
        << num(s.lat, 12) << ',' << num(s.v, 12) << ',' << num(s.gamma, 12) << ','
        << num(s.chi, 12) << ',' << num(r.h, 12) << ',' << num(r.s, 12) << ','
        << num(r.drag, 12) << ',' << num(r.dstar, 12) << ',' << num(r.dstar_dot, 12) << ','
        << num(r.dstar_ddot, 12) << ',' << num(r.x1, 12) << ',' << num(r.x2, 12) << ','
        << num(r.drag_rate, 12) << ',' << num(r.sigma, 12) << ',' << num(r.u_raw, 12) << ','
        << num(r.u, 12) << ',' << (r.saturated ? 1 : 0) << ',' << (r.held ? 1 : 0) << ','
        << num(r.xhat1, 12) << ',' << num(r.xhat2, 12) << ',' << num(r.f, 12) << ','
        << num(r.g0, 12) << ',' << num(r.energy, 12) << '\n';
  }
}

void write_log_csv(const TrajectoryLog& log, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_log_csv(log, out);
}

void write_delta_samples_csv(const std::vector<DeltaSample>& samples, std::ostream& out) {
  out << magic("delta-samples") << '\n';
  out << "t,x1,delta\n";
  for (const auto& s : samples) {
    out << num(s.t) << ',' << num(s.x1) << ',' << num(s.delta) << '\n';
  }
}

void write_delta_samples_csv(const std::vector<DeltaSample>& samples,
                             const std::filesystem::path& path) {
  auto out = open_out(path);
  write_delta_samples_csv(samples, out);
}

std::vector<DeltaSample> read_delta_samples_csv(std::istream& in) {
  expect_magic(in, "delta-samples");
  std::vector<DeltaSample> out;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "t,x1,delta") throw FormatError("unexpected delta-samples header '" + line + "'");
      header = true;
      continue;
    }
    const auto v = split_numbers(line, 3);
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

std::vector<DeltaSample> read_delta_samples_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_delta_samples_csv(in);
}

void write_scatter_csv(const BatchResult& batch, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << magic("mc-scatter") << '\n';
  out << "run,ok,mass,density,cl,cd,downrange_error_km,altitude_error_km\n";
  for (const auto& r : batch.runs) {
    out << r.index << ',' << (r.ok ? 1 : 0) << ',' << num(r.dispersions.mass, 12) << ','
        << num(r.dispersions.density, 12) << ',' << num(r.dispersions.cl, 12) << ','
        << num(r.dispersions.cd, 12) << ',' << num(r.summary.downrange_error / 1e3, 12) << ','
        << num(r.summary.altitude_error / 1e3, 12) << '\n';
  }
}

nlohmann::ordered_json to_json(const RunSummary& s, GuidanceMode mode) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(mode);
  j["terminated"] = s.terminated;
  j["t_final_s"] = s.t_final;
  j["downrange_error_km"] = s.downrange_error / 1e3;
  j["altitude_error_km"] = s.altitude_error / 1e3;
  j["downrange_final_km"] = s.s_final / 1e3;
  j["downrange_target_km"] = s.s_target / 1e3;
  j["altitude_final_km"] = s.h_final / 1e3;
  j["altitude_target_km"] = s.h_target / 1e3;
  j["final_state"] = {{"r_m", s.final_state.r},
                      {"longitude_deg", s.final_state.lon / kDeg},
                      {"latitude_deg", s.final_state.lat / kDeg},
                      {"velocity_m_s", s.final_state.v},
                      {"flight_path_angle_deg", s.final_state.gamma / kDeg},
                      {"heading_deg", s.final_state.chi / kDeg}};
  j["saturation_fraction"] = s.saturation_fraction;
  j["hold_fraction"] = s.hold_fraction;
  j["max_abs_drag_error_after_transient_m_s2"] = s.max_abs_x1_after_transient;
  j["reference_clock_start_s"] =
      s.trigger_time ? nlohmann::ordered_json(*s.trigger_time) : nlohmann::ordered_json(nullptr);
  j["steps"] = s.steps;
  return j;
}

nlohmann::ordered_json to_json(const CertifyReport& r) {
  nlohmann::ordered_json j;
  j["gains"] = {{"a", r.gains.a},   {"b", r.gains.b},   {"eps0", r.gains.eps0},
                {"l1", r.gains.l1}, {"l2", r.gains.l2}, {"eps", r.gains.eps}};
  j["P0"] = matrix_json(r.p0);
  j["P0_residual"] = r.p0_residual;
  j["P"] = matrix_json(r.p);
  j["P_residual"] = r.p_residual;
  j["delta_bound"] = {{"fitted", r.bound_fitted},
                      {"samples", r.sample_count},
                      {"l", r.l},
                      {"d", r.d}};
  j["kappa"] = finite_or_null(r.kappa);
  j["alpha"] = finite_or_null(r.alpha);
  j["Q"] = matrix_json(r.q);
  j["Q_lambda_min"] = finite_or_null(r.q_lambda_min);
  j["eps1_star"] = r.eps1_star ? nlohmann::ordered_json(*r.eps1_star) : nullptr;
  j["C0"] = r.c0;
  const auto& sf = r.constants.state_feedback;
  const auto& of = r.constants.output_feedback;
  j["state_feedback"] = {{"certified", r.state_feedback_certified},
                         {"lambda1", finite_or_null(sf.lambda1)},
                         {"lambda2", finite_or_null(sf.lambda2)},
                         {"lambda3", finite_or_null(sf.lambda3)}};
  j["output_feedback"] = {{"certified", r.output_feedback_certified},
                          {"lambda1", finite_or_null(of.lambda1)},
                          {"lambda2", finite_or_null(of.lambda2)},
                          {"lambda3", finite_or_null(of.lambda3)},
                          {"C0", finite_or_null(of.c0)}};
  j["notes"] = r.notes;
  return j;
}

nlohmann::ordered_json to_json(const MCStats& s, const DispersionSpec& spec,
                               const GuidanceConfig& g, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["runs"] = s.runs;
  j["failures"] = s.failures;
  j["failed_runs"] = s.failed_runs;
  j["seed"] = seed;
  j["gains"] = {{"a", g.a}, {"b", g.b}, {"eps0", g.eps0},
                {"l1", g.l1}, {"l2", g.l2}, {"eps", g.eps}};
  const auto iv = [](const Interval& i) {
    return nlohmann::ordered_json::array({i.lo * 100.0, i.hi * 100.0});
  };
  j["dispersions_pct"] = {{"mass", iv(spec.mass)},
                          {"density", iv(spec.density)},
                          {"cl", iv(spec.cl)},
                          {"cd", iv(spec.cd)}};
  j["downrange_error_km"] = stats_json(s.downrange_error);
  j["altitude_error_km"] = stats_json(s.altitude_error);
  return j;
}

void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace entry
