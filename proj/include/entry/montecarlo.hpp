#pragma once

// Dispersion sampling and batch execution of output-feedback runs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entry/drag_chain.hpp"
#include "entry/models.hpp"
#include "entry/sim.hpp"

namespace entry {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Uniform fractional intervals per dispersed parameter.
struct DispersionSpec {
  Interval mass{-0.05, 0.05};
  Interval density{-0.20, 0.20};
  Interval cl{-0.30, 0.30};
  Interval cd{-0.30, 0.30};

  void validate() const;
  DispersionSpec scaled(double factor) const;
  static DispersionSpec none() { return {{0, 0}, {0, 0}, {0, 0}, {0, 0}}; }
};

/// Counter-based substream: the generator for run `index` depends only on
/// (master_seed, index).
std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index);

/// Draws mass, density, C_L, C_D in that order from the run's substream.
DispersionSet sample_dispersions(const DispersionSpec& spec, std::uint64_t master_seed,
                                 std::uint64_t index);

struct MetricStats {
  double minimum = 0.0;
  double maximum = 0.0;
  double average = 0.0;
  double standard_deviation = 0.0;  // n - 1 divisor, 0 for a single run
};

struct MCStats {
  MetricStats downrange_error;  // m
  MetricStats altitude_error;   // m
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::vector<std::size_t> failed_runs;
};

struct RunOutcome {
  std::size_t index = 0;
  DispersionSet dispersions;
  bool ok = false;  // terminated without error
  std::string error;
  RunSummary summary;
  std::vector<DeltaSample> delta_samples;  // thinned, only when requested
};

struct BatchOptions {
  unsigned threads = 1;        // 0 picks the hardware concurrency
  std::size_t delta_stride = 0;  // keep every k-th Delta sample per run, 0 = none
};

struct BatchResult {
  MCStats stats;
  std::vector<RunOutcome> runs;  // ordered by run index
};

MetricStats metric_stats(const std::vector<double>& values);

/// Runs `n_runs` independent output-feedback entries. Non-terminating or
/// erroring runs count as failures and are left out of the moments.
BatchResult run_batch(std::size_t n_runs, const RunConfig& base, const DispersionSpec& spec,
                      std::uint64_t master_seed, const BatchOptions& opts = {});

}  // namespace entry
