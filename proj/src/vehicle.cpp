#include "helibo/vehicle.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "helibo/errors.hpp"

namespace helibo {

Velocity clamp_command(const Velocity& cmd, const KinematicsConfig& cfg) {
  return {std::clamp(cmd.x, -cfg.v_max_xy, cfg.v_max_xy),
          std::clamp(cmd.y, -cfg.v_max_xy, cfg.v_max_xy),
          std::clamp(cmd.z, -cfg.v_max_z, cfg.v_max_z)};
}

VehicleState step(const VehicleState& state, const Velocity& cmd,
                  const KinematicsConfig& cfg) {
  if (!std::isfinite(cmd.x) || !std::isfinite(cmd.y) || !std::isfinite(cmd.z)) {
    throw NonFiniteCommand(
        fmt::format("velocity command ({}, {}, {})", cmd.x, cmd.y, cmd.z));
  }
  const Velocity target = clamp_command(cmd, cfg);

  VehicleState next = state;
  if (cfg.tau <= 0.0) {
    next.vel = target;
  } else {
    // Forward Euler on the lag, alpha capped at 1.
    const double alpha = std::min(1.0, cfg.dt / cfg.tau);
    next.vel.x = state.vel.x + alpha * (target.x - state.vel.x);
    next.vel.y = state.vel.y + alpha * (target.y - state.vel.y);
    next.vel.z = state.vel.z + alpha * (target.z - state.vel.z);
  }
  next.pose.x += next.vel.x * cfg.dt;
  next.pose.y += next.vel.y * cfg.dt;
  next.pose.z += next.vel.z * cfg.dt;
  if (next.pose.z < 0.0) {
    next.pose.z = 0.0;
    next.vel.z = std::max(next.vel.z, 0.0);
  }
  return next;
}

}  // namespace helibo
