#include "entry/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace entry {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double draw(std::mt19937_64& rng, const Interval& iv) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (iv.lo == iv.hi) return iv.lo;
  return iv.lo + (iv.hi - iv.lo) * u;
}

}  // namespace

void DispersionSpec::validate() const {
  for (const Interval* iv : {&mass, &density, &cl, &cd}) {
    if (!(iv->lo <= iv->hi)) throw std::invalid_argument("dispersion interval has lo > hi");
  }
  if (!(mass.lo > -1.0)) throw std::invalid_argument("mass dispersion must stay above -100%");
  if (!(density.lo > -1.0)) throw std::invalid_argument("density dispersion must stay above -100%");
}

DispersionSpec DispersionSpec::scaled(double k) const {
  const auto s = [k](Interval iv) { return Interval{k * iv.lo, k * iv.hi}; };
  return {s(mass), s(density), s(cl), s(cd)};
}

std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

DispersionSet sample_dispersions(const DispersionSpec& spec, std::uint64_t master_seed,
                                 std::uint64_t index) {
  std::mt19937_64 rng(substream_seed(master_seed, index));
  DispersionSet d;
  d.mass = draw(rng, spec.mass);
  d.density = draw(rng, spec.density);
  d.cl = draw(rng, spec.cl);
  d.cd = draw(rng, spec.cd);
  return d;
}

MetricStats metric_stats(const std::vector<double>& values) {
  MetricStats s;
  if (values.empty()) return s;
  s.minimum = *std::min_element(values.begin(), values.end());
  s.maximum = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.average = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.average) * (v - s.average);
    s.standard_deviation = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  // Guard the ordering against rounding in the mean.
  s.average = std::clamp(s.average, s.minimum, s.maximum);
  return s;
}

BatchResult run_batch(std::size_t n_runs, const RunConfig& base, const DispersionSpec& spec,
                      std::uint64_t master_seed, const BatchOptions& opts) {
  if (n_runs == 0) throw std::invalid_argument("run_batch: n_runs must be at least 1");
  spec.validate();

  BatchResult out;
  out.runs.resize(n_runs);

  const auto one = [&](std::size_t i) {
    RunOutcome& o = out.runs[i];
    o.index = i;
    o.dispersions = sample_dispersions(spec, master_seed, i);
    RunConfig cfg = base;
    cfg.mode = GuidanceMode::output_feedback;
    cfg.dispersions = o.dispersions;
    cfg.seed = substream_seed(master_seed ^ 0xA5A5A5A5A5A5A5A5ULL, i);
    try {
      RunResult r = run_closed_loop(cfg);
      o.summary = r.summary;
      o.ok = r.summary.terminated && std::isfinite(r.summary.downrange_error) &&
             std::isfinite(r.summary.altitude_error);
      if (!r.summary.terminated) o.error = "did not reach the terminal velocity within max_time";
      if (opts.delta_stride > 0) {
        const auto samples = delta_diagnostic(drag_history(r.log));
        for (std::size_t k = 0; k < samples.size(); k += opts.delta_stride) {
          o.delta_samples.push_back(samples[k]);
        }
      }
    } catch (const std::exception& e) {
      o.ok = false;
      o.error = e.what();
    }
  };

  unsigned threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                       : opts.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_runs));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n_runs; ++i) one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n_runs; i = next++) one(i);
      });
    }
  }

  std::vector<double> downrange, altitude;
  for (const RunOutcome& o : out.runs) {
    if (!o.ok) {
      out.stats.failed_runs.push_back(o.index);
      continue;
    }
    downrange.push_back(o.summary.downrange_error);
    altitude.push_back(o.summary.altitude_error);
  }
  out.stats.runs = n_runs;
  out.stats.failures = out.stats.failed_runs.size();
  out.stats.downrange_error = metric_stats(downrange);
  out.stats.altitude_error = metric_stats(altitude);
  return out;
}

}  // namespace entry
