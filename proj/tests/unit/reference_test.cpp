#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "entry/io.hpp"
#include "entry/reference.hpp"
#include "entry/sim.hpp"
#include "support.hpp"

namespace entry {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// D*(t) = sin(t) sampled with exact derivatives.
ReferenceProfile sine_profile(double t0, double t1, int n) {
  std::vector<double> t, d, dd, ddd;
  for (int k = 0; k < n; ++k) {
    const double tk = t0 + (t1 - t0) * k / (n - 1);
    t.push_back(tk);
    d.push_back(2.0 + std::sin(tk));
    dd.push_back(std::cos(tk));
    ddd.push_back(-std::sin(tk));
  }
  return ReferenceProfile(t, d, dd, ddd, 1.0, {});
}

TEST(Profile, ReproducesKnots) {
  const ReferenceProfile p = sine_profile(0.0, 6.0, 13);
  for (std::size_t i = 0; i < p.knots().size(); ++i) {
    const ReferenceSample s = p.sample(p.knots()[i]);
    EXPECT_EQ(s.dstar, p.dstar()[i]);
    EXPECT_EQ(s.dstar_dot, p.dstar_dot()[i]);
    EXPECT_EQ(s.dstar_ddot, p.dstar_ddot()[i]);
  }
}

TEST(Profile, InterpolatesSmoothFunction) {
  const ReferenceProfile p = sine_profile(0.0, 6.0, 61);
  for (double t = 0.013; t < 6.0; t += 0.0917) {
    const ReferenceSample s = p.sample(t);
    EXPECT_NEAR(s.dstar, 2.0 + std::sin(t), 1e-9);
    EXPECT_NEAR(s.dstar_dot, std::cos(t), 1e-7);
    EXPECT_NEAR(s.dstar_ddot, -std::sin(t), 1e-5);
  }
}

TEST(Profile, DerivativesAreConsistentWithFiniteDifferences) {
  const ReferenceProfile& p = *test::nominal_profile();
  const double h = 1e-4;
  double worst_dot = 0.0;
  double worst_ddot = 0.0;
  double scale_dot = 0.0;
  double scale_ddot = 0.0;
  for (double t = p.start_time() + 0.5; t < p.end_time() - 0.5; t += 0.731) {
    const ReferenceSample s = p.sample(t);
    const ReferenceSample a = p.sample(t - h);
    const ReferenceSample b = p.sample(t + h);
    worst_dot = std::max(worst_dot, std::abs((b.dstar - a.dstar) / (2 * h) - s.dstar_dot));
    worst_ddot = std::max(worst_ddot, std::abs((b.dstar_dot - a.dstar_dot) / (2 * h) - s.dstar_ddot));
    scale_dot = std::max(scale_dot, std::abs(s.dstar_dot));
    scale_ddot = std::max(scale_ddot, std::abs(s.dstar_ddot));
  }
  EXPECT_LT(worst_dot / scale_dot, 1e-6);
  EXPECT_LT(worst_ddot / scale_ddot, 1e-5);
}

TEST(Profile, ContinuousAcrossKnots) {
  const ReferenceProfile& p = *test::nominal_profile();
  for (std::size_t i = 1; i + 1 < p.knots().size(); i += 97) {
    const double t = p.knots()[i];
    const ReferenceSample l = p.sample(std::nextafter(t, 0.0));
    const ReferenceSample r = p.sample(std::nextafter(t, 1e9));
    EXPECT_NEAR(l.dstar, r.dstar, 1e-9);
    EXPECT_NEAR(l.dstar_dot, r.dstar_dot, 1e-8);
    EXPECT_NEAR(l.dstar_ddot, r.dstar_ddot, 1e-6);
  }
}

TEST(Profile, ClampsOutsideRange) {
  const ReferenceProfile p = sine_profile(1.0, 4.0, 7);
  const ReferenceSample after = p.sample(10.0);
  EXPECT_EQ(after.dstar, p.dstar().back());
  EXPECT_EQ(after.dstar_dot, 0.0);
  EXPECT_EQ(after.dstar_ddot, 0.0);
  const ReferenceSample before = p.sample(0.0);
  EXPECT_EQ(before.dstar, p.dstar().front());
  EXPECT_EQ(before.dstar_dot, 0.0);
  EXPECT_EQ(before.dstar_ddot, 0.0);
}

TEST(Profile, ConstantHasZeroDerivatives) {
  const ReferenceProfile p = ReferenceProfile::constant(7.5, 0.0, 100.0);
  for (double t = -5.0; t < 110.0; t += 3.7) {
    const ReferenceSample s = p.sample(t);
    EXPECT_EQ(s.dstar, 7.5);
    EXPECT_EQ(s.dstar_dot, 0.0);
    EXPECT_EQ(s.dstar_ddot, 0.0);
  }
}

TEST(Profile, RejectsBadKnots) {
  EXPECT_THROW(ReferenceProfile({0.0, 0.0}, {1, 1}, {0, 0}, {0, 0}, 1.0, {}),
               std::invalid_argument);
  EXPECT_THROW(ReferenceProfile({0.0}, {1}, {0}, {0}, 1.0, {}), std::invalid_argument);
  EXPECT_THROW(ReferenceProfile({0.0, 1.0}, {1}, {0, 0}, {0, 0}, 1.0, {}), std::invalid_argument);
  EXPECT_THROW(ReferenceProfile({0.0, 1.0}, {1, 1}, {0, 0}, {0, 0}, 0.0, {}),
               std::invalid_argument);
}

TEST(Profile, TimeAtDrag) {
  const ReferenceProfile p = sine_profile(0.0, 3.0, 31);
  const auto t = p.time_at_drag(2.5);
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, std::asin(0.5), 1e-9);
  EXPECT_EQ(*p.time_at_drag(1.0), 0.0);
  EXPECT_FALSE(p.time_at_drag(3.5).has_value());
}

TEST(Schedule, TwoSegmentRamp) {
  const BankSchedule b = BankSchedule::two_segment(60 * kDeg, 40 * kDeg, 90.0, 10.0);
  EXPECT_EQ(b(0.0), 60 * kDeg);
  EXPECT_EQ(b(90.0), 60 * kDeg);
  EXPECT_NEAR(b(95.0), 50 * kDeg, 1e-15);
  EXPECT_EQ(b(100.0), 40 * kDeg);
  EXPECT_EQ(b(500.0), 40 * kDeg);
  EXPECT_EQ(BankSchedule::constant(0.3)(1e4), 0.3);
  EXPECT_NE(b.describe().find("two_segment"), std::string::npos);
}

TEST(Generator, HitsTargetDownrange) {
  const RefgenResult& r = test::nominal_reference();
  EXPECT_NEAR(r.achieved_downrange, 723.32e3, 0.05 * 723.32e3);
  EXPECT_NEAR(r.profile.s_target(), r.achieved_downrange, 1e-9);
  EXPECT_NEAR(r.achieved_velocity, 503.0, 503e-6);
  EXPECT_NEAR(r.achieved_altitude, 10e3, 2e3);
  EXPECT_GT(r.schedule.sigma1, 0.0);
  EXPECT_LT(r.schedule.sigma1, std::numbers::pi / 2);
  for (std::size_t i = 1; i + 1 < r.profile.dstar().size(); ++i) {
    ASSERT_GT(r.profile.dstar()[i], 0.0);
  }
}

TEST(Generator, OpenLoopRoundTrip) {
  // Re-flying the generating schedule with a finer step reproduces the knots.
  const RefgenResult& r = test::nominal_reference();
  RunConfig cfg = test::nominal_run(GuidanceMode::open_loop);
  cfg.open_loop_bank = r.schedule;
  cfg.dt = 0.025;
  const RunResult run = run_closed_loop(cfg);
  const ReferenceProfile& p = r.profile;
  double peak = *std::max_element(p.dstar().begin(), p.dstar().end());
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < run.log.records.size(); k += 2) {
    const auto& rec = run.log.records[k];
    worst = std::max(worst, std::abs(rec.drag - p.sample(rec.t).dstar));
  }
  EXPECT_LT(worst / peak, 1e-6);
}

TEST(Generator, OpenLoopTrackingErrorVanishes) {
  RunConfig cfg = test::nominal_run(GuidanceMode::open_loop);
  cfg.open_loop_bank = test::nominal_reference().schedule;
  const RunResult run = run_closed_loop(cfg);
  for (const auto& rec : run.log.records) ASSERT_LT(std::abs(rec.x1), 1e-9);
}

TEST(Generator, FailsWhenTerminalVelocityIsUnreachable) {
  RunConfig cfg = test::nominal_run(GuidanceMode::open_loop);
  cfg.reference.reset();
  cfg.max_time = 50.0;
  EXPECT_THROW(record_reference(cfg, BankSchedule::constant(0.9)), ReferenceGenerationError);
  EXPECT_THROW(generate_reference(cfg, {}), ReferenceGenerationError);
}

TEST(Generator, RejectsDispersedWorld) {
  RunConfig cfg = test::nominal_run(GuidanceMode::open_loop);
  cfg.dispersions.cd = 0.1;
  EXPECT_THROW(record_reference(cfg, BankSchedule::constant(0.9)), ReferenceGenerationError);
}

TEST(Generator, TwoSegmentFamilyMeetsBothTargets) {
  RunConfig cfg = test::nominal_run(GuidanceMode::open_loop);
  RefgenOptions opts = test::scenario().refgen;
  opts.family = RefgenOptions::Family::two_segment;
  const RefgenResult r = generate_reference(cfg, opts);
  ASSERT_TRUE(r.two_segment_converged);
  EXPECT_NEAR(r.achieved_downrange, opts.target_downrange, 1.0);
  EXPECT_NEAR(r.achieved_altitude, opts.target_altitude, 1.0);
  EXPECT_EQ(r.schedule.kind, BankSchedule::Kind::two_segment);
}

TEST(ProfileCsv, RoundTripIsExact) {
  const ReferenceProfile& p = *test::nominal_profile();
  std::stringstream buf;
  write_profile_csv(p, buf);
  const ReferenceProfile q = read_profile_csv(buf);
  EXPECT_EQ(q.knots(), p.knots());
  EXPECT_EQ(q.dstar(), p.dstar());
  EXPECT_EQ(q.dstar_dot(), p.dstar_dot());
  EXPECT_EQ(q.dstar_ddot(), p.dstar_ddot());
  EXPECT_EQ(q.s_target(), p.s_target());
  EXPECT_EQ(q.terminal().altitude, p.terminal().altitude);
  EXPECT_EQ(q.terminal().velocity, p.terminal().velocity);
  EXPECT_EQ(q.schedule().describe(), p.schedule().describe());
}

TEST(ProfileCsv, RejectsOtherVersionsAndKinds) {
  const ReferenceProfile p = sine_profile(0.0, 1.0, 3);
  std::stringstream buf;
  write_profile_csv(p, buf);
  std::string text = buf.str();
  const auto pos = text.find(" v1");
  ASSERT_NE(pos, std::string::npos);
  std::string v2 = text;
  v2.replace(pos, 3, " v2");
  std::istringstream in2(v2);
  EXPECT_THROW(read_profile_csv(in2), FormatError);

  std::istringstream other("# entry-guidance trajectory-log v1\nt\n");
  EXPECT_THROW(read_profile_csv(other), FormatError);
  std::istringstream empty("");
  EXPECT_THROW(read_profile_csv(empty), FormatError);
}

}  // namespace
}  // namespace entry
