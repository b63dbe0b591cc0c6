#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "entry/montecarlo.hpp"
#include "support.hpp"

namespace entry {
namespace {

RunConfig mc_base() {
  RunConfig cfg = test::nominal_run(GuidanceMode::output_feedback);
  cfg.guidance = test::scenario().mc_guidance;
  return cfg;
}

TEST(Sampling, StaysWithinTable2Bounds) {
  const DispersionSpec spec;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const DispersionSet d = sample_dispersions(spec, 42, i);
    ASSERT_GE(d.mass, -0.05);
    ASSERT_LE(d.mass, 0.05);
    ASSERT_GE(d.density, -0.20);
    ASSERT_LE(d.density, 0.20);
    ASSERT_GE(d.cl, -0.30);
    ASSERT_LE(d.cl, 0.30);
    ASSERT_GE(d.cd, -0.30);
    ASSERT_LE(d.cd, 0.30);
  }
}

TEST(Sampling, RoughlyUniform) {
  const DispersionSpec spec;
  double sum = 0.0;
  double sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = sample_dispersions(spec, 5, i).cd;
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 0.09 / 3.0, 0.002);  // variance of U(-0.3, 0.3)
}

TEST(Sampling, ZeroWidthIsExact) {
  const DispersionSpec none = DispersionSpec::none();
  for (std::uint64_t i = 0; i < 100; ++i) EXPECT_TRUE(sample_dispersions(none, 3, i).is_nominal());
  DispersionSpec fixed = none;
  fixed.cd = {0.1, 0.1};
  EXPECT_EQ(sample_dispersions(fixed, 3, 7).cd, 0.1);
}

TEST(Sampling, CounterBased) {
  const DispersionSpec spec;
  const DispersionSet a = sample_dispersions(spec, 9, 123);
  const DispersionSet b = sample_dispersions(spec, 9, 123);
  EXPECT_EQ(a.mass, b.mass);
  EXPECT_EQ(a.density, b.density);
  EXPECT_EQ(a.cl, b.cl);
  EXPECT_EQ(a.cd, b.cd);
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(substream_seed(9, i));
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_NE(substream_seed(9, 0), substream_seed(10, 0));
}

TEST(Spec, ValidationAndScaling) {
  DispersionSpec s;
  EXPECT_NO_THROW(s.validate());
  const DispersionSpec t = s.scaled(0.1);
  EXPECT_NEAR(t.cd.hi, 0.03, 1e-15);
  EXPECT_NEAR(t.mass.lo, -0.005, 1e-15);
  s.cl = {0.2, 0.1};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = DispersionSpec{};
  s.density = {-1.0, 0.0};
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Stats, Moments) {
  const MetricStats s = metric_stats({1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(s.minimum, 1.0);
  EXPECT_EQ(s.maximum, 4.0);
  EXPECT_DOUBLE_EQ(s.average, 2.5);
  EXPECT_DOUBLE_EQ(s.standard_deviation, std::sqrt(5.0 / 3.0));
  const MetricStats one = metric_stats({7.0});
  EXPECT_EQ(one.standard_deviation, 0.0);
  EXPECT_EQ(one.average, 7.0);
}

TEST(Batch, SingleNominalRunMatchesDirectRun) {
  const RunConfig base = mc_base();
  const BatchResult b = run_batch(1, base, DispersionSpec::none(), 1);
  const RunResult direct = run_closed_loop(base);
  ASSERT_EQ(b.stats.failures, 0u);
  EXPECT_EQ(b.stats.downrange_error.average, direct.summary.downrange_error);
  EXPECT_EQ(b.stats.altitude_error.average, direct.summary.altitude_error);
  EXPECT_EQ(b.stats.downrange_error.standard_deviation, 0.0);
}

TEST(Batch, ThreadCountDoesNotChangeResults) {
  const RunConfig base = mc_base();
  const BatchResult one = run_batch(24, base, DispersionSpec{}, 77, {1, 0});
  const BatchResult many = run_batch(24, base, DispersionSpec{}, 77, {4, 0});
  EXPECT_EQ(one.stats.downrange_error.average, many.stats.downrange_error.average);
  EXPECT_EQ(one.stats.downrange_error.standard_deviation,
            many.stats.downrange_error.standard_deviation);
  EXPECT_EQ(one.stats.altitude_error.minimum, many.stats.altitude_error.minimum);
  for (std::size_t i = 0; i < one.runs.size(); ++i) {
    EXPECT_EQ(one.runs[i].index, i);
    EXPECT_EQ(one.runs[i].summary.s_final, many.runs[i].summary.s_final);
  }
}

TEST(Batch, NarrowerDispersionsShrinkSpread) {
  const RunConfig base = mc_base();
  const BatchResult wide = run_batch(30, base, DispersionSpec{}, 5);
  const BatchResult narrow = run_batch(30, base, DispersionSpec{}.scaled(0.1), 5);
  EXPECT_LT(narrow.stats.downrange_error.standard_deviation,
            wide.stats.downrange_error.standard_deviation);
  EXPECT_LT(narrow.stats.altitude_error.standard_deviation,
            wide.stats.altitude_error.standard_deviation);
}

TEST(Batch, FailuresAreCountedAndExcluded) {
  RunConfig base = mc_base();
  base.max_time = 30.0;
  const BatchResult b = run_batch(3, base, DispersionSpec{}, 5);
  EXPECT_EQ(b.stats.failures, 3u);
  EXPECT_EQ(b.stats.failed_runs, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(b.stats.runs, 3u);
  for (const auto& r : b.runs) EXPECT_FALSE(r.ok);
}

TEST(Batch, CollectsThinnedDeltaSamples) {
  RunConfig base = mc_base();
  base.dt = 0.02;
  const BatchResult b = run_batch(2, base, DispersionSpec{}, 5, {1, 50});
  for (const auto& r : b.runs) {
    EXPECT_GT(r.delta_samples.size(), 50u);
    EXPECT_LT(r.delta_samples.size(), 1000u);
  }
}

TEST(Batch, RejectsEmptyBatch) {
  EXPECT_THROW(run_batch(0, mc_base(), DispersionSpec{}, 1), std::invalid_argument);
}

}  // namespace
}  // namespace entry
