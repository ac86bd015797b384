#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "helibo/errors.hpp"
#include "helibo/rng.hpp"
#include "helibo/vehicle.hpp"

using namespace helibo;

TEST(Vehicle, ZeroCommandAtRestIsEquilibrium) {
  VehicleState s{{1, 2, 3}, {}};
  EXPECT_EQ(step(s, {}, KinematicsConfig{}), s);
}

TEST(Vehicle, InstantResponseIntegratesDirectly) {
  KinematicsConfig cfg;
  cfg.tau = 0.0;
  const auto next = step({{0, 0, 10}, {}}, {1, 0, 0}, cfg);
  EXPECT_NEAR(next.pose.x, 0.02, 1e-15);
  EXPECT_EQ(next.pose.y, 0.0);
  EXPECT_EQ(next.pose.z, 10.0);
}

TEST(Vehicle, ClampedCommandMatchesHandStepping) {
  KinematicsConfig cfg;  // dt 0.02, tau 0.3, v_max 5
  VehicleState s{{0, 0, 50}, {}};
  double vx = 0.0, x = 0.0;
  const double alpha = 0.02 / 0.3;
  for (int i = 0; i < 200; ++i) {
    s = step(s, {100, 0, 0}, cfg);
    vx = vx + alpha * (5.0 - vx);
    x += vx * 0.02;
    EXPECT_LE(s.vel.x, 5.0);
    EXPECT_NEAR(s.vel.x, vx, 1e-12);
    EXPECT_NEAR(s.pose.x, x, 1e-10);
  }
}

TEST(Vehicle, StraightLineWithoutLag) {
  KinematicsConfig cfg;
  cfg.tau = 0.0;
  VehicleState s{{0, 0, 20}, {}};
  for (int i = 0; i < 500; ++i) s = step(s, {2, -1, -0.5}, cfg);
  EXPECT_NEAR(s.pose.x, 2 * 500 * 0.02, 1e-9);
  EXPECT_NEAR(s.pose.y, -500 * 0.02, 1e-9);
  EXPECT_NEAR(s.pose.z, 20 - 0.5 * 500 * 0.02, 1e-9);
}

TEST(Vehicle, AltitudeNeverNegative) {
  KinematicsConfig cfg;
  VehicleState s{{0, 0, 0.1}, {0, 0, -3}};
  for (int i = 0; i < 50; ++i) {
    s = step(s, {0, 0, -3}, cfg);
    EXPECT_GE(s.pose.z, 0.0);
  }
  EXPECT_EQ(s.pose.z, 0.0);
}

TEST(Vehicle, RandomCommandsKeepSpeedWithinLimits) {
  KinematicsConfig cfg;
  Rng rng(3);
  std::uniform_real_distribution<double> u(-50, 50);
  VehicleState s{{0, 0, 60}, {}};
  for (int i = 0; i < 2000; ++i) {
    s = step(s, {u(rng), u(rng), u(rng)}, cfg);
    EXPECT_LE(std::abs(s.vel.x), cfg.v_max_xy + 1e-12);
    EXPECT_LE(std::abs(s.vel.y), cfg.v_max_xy + 1e-12);
    EXPECT_LE(std::abs(s.vel.z), cfg.v_max_z + 1e-12);
    EXPECT_GE(s.pose.z, 0.0);
  }
}

TEST(Vehicle, NonFiniteCommandThrows) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(step({}, {nan, 0, 0}, KinematicsConfig{}), NonFiniteCommand);
  EXPECT_THROW(step({}, {0, 0, INFINITY}, KinematicsConfig{}), NonFiniteCommand);
}

TEST(Vehicle, Deterministic) {
  VehicleState a{{1, 1, 30}, {}}, b = a;
  for (int i = 0; i < 100; ++i) {
    a = step(a, {0.3 * i, -1, -2}, KinematicsConfig{});
    b = step(b, {0.3 * i, -1, -2}, KinematicsConfig{});
  }
  EXPECT_EQ(a, b);
}
