#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "entry/dynamics.hpp"
#include "entry/integrator.hpp"

namespace entry {
namespace {

const PlanetModel kMars{};
const VehicleModel kVehicle{};
constexpr double kDeg = std::numbers::pi / 180.0;

EntryState entry_state() {
  return {kMars.r_ref + 60e3, 0.1, 0.05, 5000.0, -10.0 * kDeg, 80.0 * kDeg};
}

TEST(Eom, LevelFlightHasNoClimbRate) {
  EntryState s = entry_state();
  s.gamma = 0.0;
  EXPECT_EQ(eom_rhs(s, 0.3, kMars, kVehicle).r, 0.0);
}

TEST(Eom, CircularSpeedWithHorizontalLiftKeepsGamma) {
  EntryState s = entry_state();
  s.gamma = 0.0;
  s.v = std::sqrt(gravity(s.r, kMars) * s.r);
  EXPECT_NEAR(eom_rhs(s, std::numbers::pi / 2, kMars, kVehicle).gamma, 0.0, 1e-15);
}

TEST(Eom, EquatorialLiftUpKeepsHeading) {
  EntryState s = entry_state();
  s.lat = 0.0;
  EXPECT_EQ(eom_rhs(s, 0.0, kMars, kVehicle).chi, 0.0);
}

TEST(Eom, EnergyRateIsMinusVD) {
  const DispersionSet disp{0.02, 0.1, -0.2, 0.15};
  for (double sigma : {0.0, 1.0, 2.5}) {
    const EntryState s = entry_state();
    const StateDerivative d = eom_rhs(s, sigma, kMars, kVehicle, disp);
    const double e_dot = s.v * d.v + gravity(s.r, kMars) * d.r;
    const double rho = atmospheric_density(kMars.altitude(s.r), kMars, disp.density);
    const double drag = aero_accels(rho, s.v, kVehicle, disp).drag;
    EXPECT_NEAR(e_dot / (-s.v * drag), 1.0, 1e-12);
  }
}

TEST(Eom, DeterministicAndFinite) {
  const EntryState s = entry_state();
  const StateDerivative a = eom_rhs(s, 0.7, kMars, kVehicle);
  const StateDerivative b = eom_rhs(s, 0.7, kMars, kVehicle);
  EXPECT_EQ(a, b);
  for (double x : {a.r, a.lon, a.lat, a.v, a.gamma, a.chi}) EXPECT_TRUE(std::isfinite(x));
}

TEST(Eom, DomainChecks) {
  EntryState s = entry_state();
  s.gamma = std::numbers::pi / 2;
  EXPECT_THROW(eom_rhs(s, 0.0, kMars, kVehicle), DomainError);
  s = entry_state();
  s.lat = -std::numbers::pi / 2;
  EXPECT_THROW(eom_rhs(s, 0.0, kMars, kVehicle), DomainError);
  s = entry_state();
  s.v = 0.0;
  EXPECT_THROW(eom_rhs(s, 0.0, kMars, kVehicle), DomainError);
  s = entry_state();
  s.r = -1.0;
  EXPECT_THROW(check_domain(s), DomainError);
}

TEST(Eom, BallisticDescentIsMonotone) {
  // No lift: altitude falls while gamma stays negative.
  VehicleModel ballistic = kVehicle;
  ballistic.cl0 = 0.0;
  EntryState s{kMars.r_ref + 120e3, 0, 0, 6000.0, -12.0 * kDeg, 0.0};
  double prev_r = s.r;
  for (int k = 0; k < 2000 && s.gamma < 0.0; ++k) {
    const auto rhs = [&](double, const Eigen::Matrix<double, 6, 1>& x) {
      const StateDerivative d =
          eom_rhs({x[0], x[1], x[2], x[3], x[4], x[5]}, 0.0, kMars, ballistic);
      Eigen::Matrix<double, 6, 1> dx;
      dx << d.r, d.lon, d.lat, d.v, d.gamma, d.chi;
      return dx;
    };
    Eigen::Matrix<double, 6, 1> x;
    x << s.r, s.lon, s.lat, s.v, s.gamma, s.chi;
    x = rk4_step(rhs, 0.0, x, 0.1);
    s = {x[0], x[1], x[2], x[3], x[4], x[5]};
    if (s.gamma < 0.0) {
      EXPECT_LT(s.r, prev_r);
    }
    prev_r = s.r;
  }
}

TEST(Downrange, Rate) {
  EntryState s = entry_state();
  s.gamma = 0.0;
  EXPECT_EQ(downrange_rate(s), s.v);
  s.gamma = std::nextafter(std::numbers::pi / 2, 0.0);
  EXPECT_NEAR(downrange_rate(s), 0.0, 1e-9);
}

TEST(Downrange, ConstantSegment) {
  EntryState s = entry_state();
  const auto rhs = [&](double, const Eigen::Matrix<double, 1, 1>&) {
    return Eigen::Matrix<double, 1, 1>::Constant(downrange_rate(s));
  };
  Eigen::Matrix<double, 1, 1> x = Eigen::Matrix<double, 1, 1>::Zero();
  for (int k = 0; k < 100; ++k) x = rk4_step(rhs, 0.0, x, 0.1);
  EXPECT_NEAR(x[0], s.v * 10.0 * std::cos(s.gamma), 1e-8);
}

TEST(Energy, CircularState) {
  EntryState s = entry_state();
  s.v = std::sqrt(kMars.mu / s.r);
  EXPECT_NEAR(specific_energy(s, kMars), -kMars.mu / (2.0 * s.r), 1e-6);
}

TEST(Energy, VanishesAtRestFarAway) {
  EntryState s = entry_state();
  s.v = 0.0;
  s.r = 1e30;
  EXPECT_NEAR(specific_energy(s, kMars), 0.0, 1e-15);
}

TEST(Angles, HeadingWrapsAndLongitudeAccumulates) {
  EntryState s = entry_state();
  s.chi = 3.5 * std::numbers::pi;
  s.lon = 7.0;
  normalize_angles(s);
  EXPECT_NEAR(s.chi, -0.5 * std::numbers::pi, 1e-12);
  EXPECT_EQ(s.lon, 7.0);
  s.chi = -std::numbers::pi;
  normalize_angles(s);
  EXPECT_NEAR(s.chi, std::numbers::pi, 1e-15);
}

}  // namespace
}  // namespace entry
