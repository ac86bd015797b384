#include "helibo/controller.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "helibo/errors.hpp"

namespace helibo {

ErrorVector compute_error(const BoundingBox& center, const BoundingBox& observed) {
  return {center.cx - observed.cx, center.cy - observed.cy,
          (center.area() - observed.area()) / center.area()};
}

bool PidGains::is_valid() const {
  for (const AxisGains* g : {&x, &y, &z}) {
    if (!(g->kp >= 0.0 && g->ki >= 0.0 && g->kd >= 0.0)) return false;
  }
  return true;
}

std::pair<PidState, PidOutput> pid_step(const PidState& state,
                                        const ErrorVector& e,
                                        const PidGains& gains,
                                        const CommandMapping& mapping) {
  if (!std::isfinite(e.ex) || !std::isfinite(e.ey) || !std::isfinite(e.ez)) {
    throw NonFiniteError(fmt::format("error vector ({}, {}, {})", e.ex, e.ey, e.ez));
  }
  const std::array<double, 3> err{e.ex, e.ey, e.ez};
  const std::array<const AxisGains*, 3> g{&gains.x, &gains.y, &gains.z};

  PidState next = state;
  PidOutput out;
  for (std::size_t i = 0; i < 3; ++i) {
    next.integral[i] =
        std::clamp(state.integral[i] + err[i] * state.dt, -state.i_max, state.i_max);
    const double derivative =
        state.has_prev ? (err[i] - state.prev_error[i]) / state.dt : 0.0;
    out.image_axis[i] =
        g[i]->kp * err[i] + g[i]->ki * next.integral[i] + g[i]->kd * derivative;
    next.prev_error[i] = err[i];
  }
  next.has_prev = true;

  // Downward camera: image x is world east, image y is world south. A
  // positive ex means the pad sits west of the image center.
  const double horizontal = mapping.metric
                                ? mapping.altitude_estimate / mapping.focal
                                : mapping.pixel_gain;
  const double vertical = mapping.metric ? mapping.altitude_estimate : 1.0;
  out.command.x = -out.image_axis[0] * horizontal;
  out.command.y = out.image_axis[1] * horizontal;
  out.command.z = -out.image_axis[2] * vertical;
  return {next, out};
}

Guidance::Guidance(GuidanceConfig cfg, CameraModel cam, double pad_side_m,
                   const KinematicsConfig& kin)
    : cfg_(cfg),
      cam_(cam),
      pad_side_m_(pad_side_m),
      limits_{kin.v_max_xy, kin.v_max_xy, kin.v_max_z} {
  pid_.dt = kin.dt;
  pid_.i_max = cfg.i_max;
}

Velocity Guidance::update(const std::optional<BoundingBox>& target) {
  if (!target) {
    ++frames_lost_;
    if (frames_lost_ <= cfg_.hold_frames) return last_cmd_;
    // Hover in place; restart the derivative on reacquisition.
    pid_.has_prev = false;
    last_cmd_ = Velocity{};
    return last_cmd_;
  }
  frames_lost_ = 0;
  last_error_ = compute_error(cam_.center_box, *target);
  CommandMapping mapping;
  mapping.metric = cfg_.metric;
  mapping.focal = cam_.focal();
  mapping.altitude_estimate =
      altitude_from_area(target->area(), pad_side_m_, cam_);
  mapping.pixel_gain = cam_.image_px;
  auto [next, out] = pid_step(pid_, last_error_, cfg_.gains, mapping);
  if (cfg_.anti_windup) {
    const std::array<double, 3> cmd{out.command.x, out.command.y, out.command.z};
    for (std::size_t i = 0; i < 3; ++i) {
      if (std::abs(cmd[i]) > limits_[i]) next.integral[i] = pid_.integral[i];
    }
  }
  pid_ = next;
  last_cmd_ = out.command;
  return last_cmd_;
}

}  // namespace helibo
