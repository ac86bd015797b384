#pragma once

#include <array>
#include <optional>
#include <utility>

#include "helibo/geometry.hpp"
#include "helibo/vehicle.hpp"

namespace helibo {

// e = b_c - b_o: image-center offsets plus the area deficit relative to the
// center box.
struct ErrorVector {
  double ex = 0.0;
  double ey = 0.0;
  double ez = 0.0;
};

ErrorVector compute_error(const BoundingBox& center, const BoundingBox& observed);

struct AxisGains {
  double kp = 0.8;
  double ki = 0.05;
  double kd = 0.2;
};

struct PidGains {
  AxisGains x{};
  AxisGains y{};
  AxisGains z{};

  bool is_valid() const;
};

struct PidState {
  std::array<double, 3> integral{};
  std::array<double, 3> prev_error{};
  bool has_prev = false;  // first step after (re)start has no derivative
  double dt = 0.02;
  double i_max = 1.0;
};

// How image-axis PID outputs become world velocities.
struct CommandMapping {
  bool metric = true;             // scale by the altitude estimate
  double focal = 0.5;             // normalized focal factor
  double altitude_estimate = 1.0; // camera altitude implied by the box size, m
  double pixel_gain = 640.0;      // raw mode: image units -> pixels
};

struct PidOutput {
  std::array<double, 3> image_axis{};  // K_p e + K_i I + K_d de/dt per axis
  Velocity command{};                  // world-frame velocity command
};

// One discrete PID step: rectangular integration with anti-windup clamp,
// backward-difference derivative. Throws NonFiniteError on NaN/inf error.
std::pair<PidState, PidOutput> pid_step(const PidState& state,
                                        const ErrorVector& e,
                                        const PidGains& gains,
                                        const CommandMapping& mapping);

struct GuidanceConfig {
  PidGains gains{};
  double i_max = 1.0;
  bool metric = true;
  int hold_frames = 25;
  bool anti_windup = true;  // freeze an axis integral while its command saturates
};

// Closed-loop guidance: PID on the tracked box, with a short command hold
// and then a hover while no confirmed track is available.
class Guidance {
 public:
  Guidance(GuidanceConfig cfg, CameraModel cam, double pad_side_m,
           const KinematicsConfig& kin);

  Velocity update(const std::optional<BoundingBox>& target);

  const ErrorVector& last_error() const { return last_error_; }
  const PidState& pid() const { return pid_; }
  int frames_without_target() const { return frames_lost_; }

 private:
  GuidanceConfig cfg_;
  CameraModel cam_;
  double pad_side_m_;
  std::array<double, 3> limits_{};
  PidState pid_;
  Velocity last_cmd_{};
  ErrorVector last_error_{};
  int frames_lost_ = 0;
};

}  // namespace helibo
