#pragma once

#include "helibo/geometry.hpp"

namespace helibo {

struct Velocity {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Velocity&, const Velocity&) = default;
};

struct VehicleState {
  WorldPose pose{};
  Velocity vel{};

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct KinematicsConfig {
  double dt = 0.02;      // s, 50 Hz
  double tau = 0.3;      // s, first-order velocity lag; 0 tracks instantly
  double v_max_xy = 5.0; // m/s per horizontal axis
  double v_max_z = 3.0;  // m/s vertical

  bool is_valid() const {
    return dt > 0.0 && tau >= 0.0 && v_max_xy > 0.0 && v_max_z > 0.0;
  }
};

Velocity clamp_command(const Velocity& cmd, const KinematicsConfig& cfg);

// Advances the kinematic stand-in by one period. Throws NonFiniteCommand on
// NaN/inf commands.
VehicleState step(const VehicleState& state, const Velocity& cmd,
                  const KinematicsConfig& cfg);

}  // namespace helibo
