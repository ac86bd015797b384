#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "helibo/controller.hpp"
#include "helibo/errors.hpp"

using namespace helibo;

namespace {

const BoundingBox kCenter{0.5, 0.5, 0.5, 0.5};

PidGains only(double kp, double ki, double kd) {
  PidGains g;
  g.x = g.y = g.z = {kp, ki, kd};
  return g;
}

}  // namespace

TEST(Error, CoincidentBoxesGiveZero) {
  const auto e = compute_error(kCenter, kCenter);
  EXPECT_EQ(e.ex, 0.0);
  EXPECT_EQ(e.ey, 0.0);
  EXPECT_EQ(e.ez, 0.0);
}

TEST(Error, HalfAreaGivesHalfDeficit) {
  const double side = 0.5 / std::sqrt(2.0);
  const auto e = compute_error(kCenter, {0.5, 0.5, side, side});
  EXPECT_NEAR(e.ez, 0.5, 1e-12);
}

TEST(Error, RightShiftGivesNegativeEx) {
  EXPECT_NEAR(compute_error(kCenter, {0.7, 0.5, 0.1, 0.1}).ex, -0.2, 1e-12);
}

TEST(Pid, PureProportional) {
  auto [st, out] = pid_step(PidState{}, {0.1, 0, 0}, only(2, 0, 0), CommandMapping{});
  EXPECT_NEAR(out.image_axis[0], 0.2, 1e-15);
  EXPECT_EQ(out.image_axis[1], 0.0);
}

TEST(Pid, IntegralIsDiscreteSum) {
  PidState st;
  const double e = 0.05, ki = 0.3;
  PidOutput out;
  for (int n = 1; n <= 40; ++n) {
    std::tie(st, out) = pid_step(st, {e, e, e}, only(0, ki, 0), CommandMapping{});
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += e * st.dt;
    EXPECT_NEAR(out.image_axis[0], ki * sum, 1e-15);
    EXPECT_NEAR(out.image_axis[0], ki * e * n * st.dt, 1e-12);
  }
}

TEST(Pid, ZeroErrorZeroCommand) {
  auto [st, out] = pid_step(PidState{}, {}, PidGains{}, CommandMapping{});
  EXPECT_EQ(out.command, Velocity{});
}

TEST(Pid, DerivativeIsBackwardDifference) {
  PidState st;
  PidOutput out;
  std::tie(st, out) = pid_step(st, {0.1, 0, 0}, only(0, 0, 1), CommandMapping{});
  EXPECT_EQ(out.image_axis[0], 0.0);
  std::tie(st, out) = pid_step(st, {0.3, 0, 0}, only(0, 0, 1), CommandMapping{});
  EXPECT_NEAR(out.image_axis[0], 0.2 / st.dt, 1e-9);
}

TEST(Pid, IntegralIsClamped) {
  PidState st;
  PidOutput out;
  for (int i = 0; i < 10000; ++i)
    std::tie(st, out) = pid_step(st, {1, -1, 1}, only(0, 1, 0), CommandMapping{});
  EXPECT_EQ(st.integral[0], st.i_max);
  EXPECT_EQ(st.integral[1], -st.i_max);
}

TEST(Pid, MetricScalingAndAxisMapping) {
  CommandMapping m;
  m.metric = true;
  m.focal = 0.5;
  m.altitude_estimate = 20.0;
  auto [st, out] = pid_step(PidState{}, {0.1, 0.1, 0.1}, only(1, 0, 0), m);
  EXPECT_NEAR(out.command.x, -0.1 * 20 / 0.5, 1e-12);
  EXPECT_NEAR(out.command.y, 0.1 * 20 / 0.5, 1e-12);
  EXPECT_NEAR(out.command.z, -0.1 * 20, 1e-12);
  m.metric = false;
  std::tie(st, out) = pid_step(PidState{}, {0.1, 0, 0}, only(1, 0, 0), m);
  EXPECT_NEAR(out.command.x, -0.1 * 640, 1e-9);
}

TEST(Pid, NonFiniteErrorThrows) {
  EXPECT_THROW(pid_step(PidState{}, {std::numeric_limits<double>::quiet_NaN(), 0, 0},
                        PidGains{}, CommandMapping{}),
               NonFiniteError);
}

TEST(GuidanceTest, HoldsThenHovers) {
  GuidanceConfig cfg;
  Guidance g(cfg, CameraModel{}, 2.0, KinematicsConfig{});
  const Velocity v = g.update(BoundingBox{0.6, 0.4, 0.05, 0.05});
  EXPECT_NE(v, Velocity{});
  for (int i = 0; i < cfg.hold_frames; ++i) EXPECT_EQ(g.update(std::nullopt), v);
  EXPECT_EQ(g.update(std::nullopt), Velocity{});
  EXPECT_FALSE(g.pid().has_prev);
}

TEST(GuidanceTest, PadWestOfCenterCommandsWest) {
  Guidance g(GuidanceConfig{}, CameraModel{}, 2.0, KinematicsConfig{});
  const Velocity v = g.update(BoundingBox{0.3, 0.5, 0.05, 0.05});
  EXPECT_LT(v.x, 0.0);
  EXPECT_LT(v.z, 0.0);
}

TEST(GuidanceTest, SaturatedAxisDoesNotIntegrate) {
  GuidanceConfig cfg;
  Guidance g(cfg, CameraModel{}, 2.0, KinematicsConfig{});
  // Far off-center at high altitude: the horizontal command exceeds v_max.
  const BoundingBox far{0.9, 0.5, 0.008, 0.008};
  for (int i = 0; i < 50; ++i) g.update(far);
  EXPECT_EQ(g.pid().integral[0], 0.0);
  cfg.anti_windup = false;
  Guidance plain(cfg, CameraModel{}, 2.0, KinematicsConfig{});
  for (int i = 0; i < 50; ++i) plain.update(far);
  EXPECT_NEAR(plain.pid().integral[0], -0.4 * 50 * 0.02, 1e-12);
}
