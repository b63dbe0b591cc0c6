// Command-line driver: reference generation, single runs, certification and
// Monte Carlo batches.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "entry/certify.hpp"
#include "entry/io.hpp"
#include "entry/montecarlo.hpp"
#include "entry/reference.hpp"
#include "entry/scenario.hpp"
#include "entry/sim.hpp"

namespace fs = std::filesystem;
using namespace entry;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::optional<double> dt;
};

ScenarioConfig load(const Common& c) {
  ScenarioConfig s = c.config.empty() ? default_scenario() : load_scenario(c.config);
  if (c.dt) {
    if (!(*c.dt > 0.0)) throw UsageError("--dt must be positive");
    s.dt = *c.dt;
  }
  return s;
}

std::shared_ptr<const ReferenceProfile> obtain_profile(const ScenarioConfig& s,
                                                       const std::string& flag) {
  std::optional<std::string> path;
  if (!flag.empty()) {
    path = flag;
  } else if (s.reference_profile) {
    path = s.reference_profile;
  }
  if (path) {
    if (!fs::exists(*path)) throw UsageError("profile file does not exist: " + *path);
    try {
      return std::make_shared<const ReferenceProfile>(read_profile_csv(fs::path(*path)));
    } catch (const FormatError& e) {
      throw UsageError(e.what());
    }
  }
  std::cerr << "no reference profile given; generating one from the scenario\n";
  RunConfig nominal = s.run_config(GuidanceMode::open_loop);
  return std::make_shared<const ReferenceProfile>(generate_reference(nominal, s.refgen).profile);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

int cmd_refgen(const Common& common, const std::string& out) {
  const ScenarioConfig s = load(common);
  RunConfig nominal = s.run_config(GuidanceMode::open_loop);
  const RefgenResult r = generate_reference(nominal, s.refgen);
  if (const auto parent = fs::path(out).parent_path(); !parent.empty()) ensure_dir(parent.string());
  write_profile_csv(r.profile, fs::path(out));
  std::cout << "bank schedule:       " << r.schedule.describe() << '\n'
            << "s_target (km):       " << r.achieved_downrange / 1e3 << '\n'
            << "terminal altitude:   " << r.achieved_altitude / 1e3 << " km\n"
            << "terminal velocity:   " << r.achieved_velocity << " m/s\n"
            << "flight time (s):     " << r.flight_time << '\n'
            << "knots:               " << r.profile.knots().size() << '\n';
  return 0;
}

int cmd_simulate(const Common& common, const std::string& mode_text, const std::string& profile,
                 const std::string& out_dir, std::optional<double> eps) {
  ScenarioConfig s = load(common);
  if (eps) s.guidance.eps = *eps;
  const GuidanceMode mode = parse_mode(mode_text);
  auto ref = obtain_profile(s, profile);
  RunConfig cfg = s.run_config(mode, ref);
  if (mode == GuidanceMode::open_loop) cfg.open_loop_bank = ref->schedule();
  const RunResult run = run_closed_loop(cfg);
  ensure_dir(out_dir);
  write_log_csv(run.log, fs::path(out_dir) / "trajectory.csv");
  write_json(to_json(run.summary, mode), fs::path(out_dir) / "summary.json");
  std::cout << "mode:                " << to_string(mode) << '\n'
            << "terminated:          " << (run.summary.terminated ? "yes" : "no") << '\n'
            << "downrange error:     " << run.summary.downrange_error / 1e3 << " km\n"
            << "altitude error:      " << run.summary.altitude_error / 1e3 << " km\n";
  return run.summary.terminated ? 0 : 1;
}

int cmd_certify(const Common& common, const std::string& samples, const std::string& out,
                bool mc_gains) {
  const ScenarioConfig s = load(common);
  const GuidanceConfig gains = mc_gains ? s.mc_guidance : s.guidance;
  std::vector<double> delta, x1;
  if (!samples.empty()) {
    if (!fs::exists(samples)) throw UsageError("samples file does not exist: " + samples);
    std::vector<DeltaSample> rows;
    try {
      rows = read_delta_samples_csv(fs::path(samples));
    } catch (const FormatError& e) {
      throw UsageError(e.what());
    }
    for (const auto& r : rows) {
      delta.push_back(r.delta);
      x1.push_back(r.x1);
    }
    if (delta.empty()) throw UsageError("samples file has no rows: " + samples);
  }
  const CertifyReport report = certify(gains, delta, x1);
  const auto j = to_json(report);
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    if (const auto parent = fs::path(out).parent_path(); !parent.empty()) {
      ensure_dir(parent.string());
    }
    write_json(j, fs::path(out));
    std::cout << "kappa:      " << report.kappa << '\n'
              << "eps1_star:  " << (report.eps1_star ? std::to_string(*report.eps1_star) : "none")
              << '\n';
  }
  return 0;
}

int cmd_mc(const Common& common, std::size_t n, std::uint64_t seed, const std::string& out_dir,
           const std::string& profile, unsigned threads, bool per_run, std::size_t delta_stride) {
  const ScenarioConfig s = load(common);
  auto ref = obtain_profile(s, profile);
  RunConfig base = s.run_config(GuidanceMode::output_feedback, ref);
  base.guidance = s.mc_guidance;
  BatchOptions opts;
  opts.threads = threads;
  opts.delta_stride = delta_stride;
  const BatchResult batch = run_batch(n, base, s.dispersions, seed, opts);

  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  write_json(to_json(batch.stats, s.dispersions, s.mc_guidance, seed), dir / "mc_stats.json");
  write_scatter_csv(batch, dir / "mc_scatter.csv");
  if (delta_stride > 0) {
    std::vector<DeltaSample> all;
    for (const auto& r : batch.runs) {
      all.insert(all.end(), r.delta_samples.begin(), r.delta_samples.end());
    }
    write_delta_samples_csv(all, dir / "delta_samples.csv");
  }
  if (per_run) {
    ensure_dir((dir / "runs").string());
    for (const auto& r : batch.runs) {
      if (!r.ok) continue;
      write_json(to_json(r.summary, GuidanceMode::output_feedback),
                 dir / "runs" / ("run_" + std::to_string(r.index) + ".json"));
    }
  }

  const auto& st = batch.stats;
  std::cout << "runs: " << st.runs << "  failures: " << st.failures << '\n'
            << "                  downrange (km)   altitude (km)\n"
            << "minimum           " << st.downrange_error.minimum / 1e3 << "   "
            << st.altitude_error.minimum / 1e3 << '\n'
            << "maximum           " << st.downrange_error.maximum / 1e3 << "   "
            << st.altitude_error.maximum / 1e3 << '\n'
            << "average           " << st.downrange_error.average / 1e3 << "   "
            << st.altitude_error.average / 1e3 << '\n'
            << "std deviation     " << st.downrange_error.standard_deviation / 1e3 << "   "
            << st.altitude_error.standard_deviation / 1e3 << '\n';
  for (const auto& r : batch.runs) {
    if (!r.ok) std::cerr << "run " << r.index << " failed: " << r.error << '\n';
  }
  return st.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drag-tracking entry guidance: reference generation, simulation, certification"};
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config, "Scenario file (defaults built in)");
    sub->add_option("--dt", common.dt, "Override the integration step (s)");
  };

  std::string out_path, profile, out_dir, mode, samples;
  std::optional<double> eps;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool per_run = false;
  bool mc_gains = false;
  std::size_t delta_stride = 0;

  auto* refgen = app.add_subcommand("refgen", "Generate the reference drag profile");
  add_common(refgen);
  refgen->add_option("-o,--out", out_path, "Profile CSV to write")->required();

  auto* simulate = app.add_subcommand("simulate", "Run one entry");
  add_common(simulate);
  simulate->add_option("-m,--mode", mode, "open-loop-nominal | state-feedback | output-feedback")
      ->required()
      ->check(CLI::IsMember({"open-loop-nominal", "state-feedback", "output-feedback"}));
  simulate->add_option("-p,--profile", profile, "Reference profile CSV");
  simulate->add_option("-o,--out-dir", out_dir, "Output directory")->required();
  simulate->add_option("--eps", eps, "Override the observer eps")->check(CLI::PositiveNumber);

  auto* cert = app.add_subcommand("certify", "Evaluate the stability certificates");
  add_common(cert);
  cert->add_option("-s,--samples", samples, "Delta samples CSV from a dispersed batch");
  cert->add_option("-o,--out", out_path, "Report JSON (stdout if omitted)");
  cert->add_flag("--mc-gains", mc_gains, "Use the Monte Carlo gain set");

  auto* mc = app.add_subcommand("mc", "Monte Carlo dispersion batch");
  add_common(mc);
  mc->add_option("-n,--runs", n, "Number of runs")->required()->check(CLI::Range(1ul, 10000000ul));
  mc->add_option("--seed", seed, "Master seed");
  mc->add_option("-o,--out-dir", out_dir, "Output directory")->required();
  mc->add_option("-p,--profile", profile, "Reference profile CSV");
  mc->add_option("-j,--threads", threads, "Worker threads (0 = all cores)");
  mc->add_flag("--per-run", per_run, "Write one summary JSON per run");
  mc->add_option("--delta-stride", delta_stride, "Keep every k-th Delta sample per run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (refgen->parsed()) return cmd_refgen(common, out_path);
    if (simulate->parsed()) return cmd_simulate(common, mode, profile, out_dir, eps);
    if (cert->parsed()) return cmd_certify(common, samples, out_path, mc_gains);
    if (mc->parsed()) {
      return cmd_mc(common, n, seed, out_dir, profile, threads, per_run, delta_stride);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
