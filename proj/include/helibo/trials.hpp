#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "helibo/controller.hpp"
#include "helibo/detector.hpp"
#include "helibo/geometry.hpp"
#include "helibo/tracker.hpp"
#include "helibo/vehicle.hpp"

namespace helibo {

struct TrialConfig {
  double init_xy_range = 40.0;  // uniform offset in [-R, R] per axis, m
  double init_z_min = 20.0;
  double init_z_max = 120.0;
  int max_steps = 15000;
  double success_xy = 4.0;
  double success_z = 1.0;
  double touchdown_z = 0.05;    // vehicle altitude that ends a trial
  bool euclidean = false;       // horizontal check as a radius instead of per axis
  int trials_per_eval = 10;
  std::uint64_t seed = 0;
  int threads = 1;

  bool is_valid() const;
};

// Detector settings shared by every model the harness builds.
struct DetectorSettings {
  Landscape landscape = Landscape::calibrated();
  double noise = 0.01;
  double min_visible_area = 6.0e-5;
  ClutterConfig clutter{};
  double subset_jitter = kSubsetJitter;

  DetectorModel model_for(const AugParams& p) const;
};

// Everything a landing trial needs besides the detector and the seed.
struct Scenario {
  Helipad pad{};
  CameraModel camera{};
  KinematicsConfig kinematics{};
  GuidanceConfig guidance{};
  TrackerConfig tracker{};
  TrialConfig trials{};
  DetectorSettings detector{};
};

struct TraceStep {
  WorldPose pose;
  ErrorVector error;
  bool detected = false;
};

struct TrialOutcome {
  WorldPose init{};
  WorldPose final{};
  bool success = false;
  bool touched_down = false;
  int steps_used = 0;
  std::vector<TraceStep> trace;

  friend bool operator==(const TrialOutcome& a, const TrialOutcome& b) {
    return a.init == b.init && a.final == b.final && a.success == b.success &&
           a.touched_down == b.touched_down && a.steps_used == b.steps_used;
  }
};

struct EvalResult {
  AugParams params{};
  EnvCondition env = EnvCondition::ClearDay;
  double success_rate = 0.0;
  std::vector<TrialOutcome> outcomes;

  int successes() const;
};

bool landing_success(const WorldPose& final, const Helipad& pad,
                     const TrialConfig& cfg);

WorldPose sample_initial_pose(const Helipad& pad, const TrialConfig& cfg,
                              Rng& rng);

TrialOutcome run_trial_from(const DetectorModel& model, EnvCondition env,
                            const Scenario& scenario, const WorldPose& init,
                            std::uint64_t trial_seed, bool record_trace = false);

TrialOutcome run_trial(const DetectorModel& model, EnvCondition env,
                       const Scenario& scenario, std::uint64_t trial_seed,
                       bool record_trace = false);

std::uint64_t trial_seed(std::uint64_t base, int eval_index, int trial_index);

EvalResult evaluate(const AugParams& params, EnvCondition env,
                    const Scenario& scenario, int eval_index = 0);
EvalResult evaluate_model(const DetectorModel& model, EnvCondition env,
                          const Scenario& scenario, int eval_index = 0);

inline constexpr int kProbeFrames = 100;

// Mean detection confidence from the extreme start (pad + 40, pad + 40,
// 120 m); missed frames count as zero.
double confidence_probe(const DetectorModel& model, EnvCondition env,
                        const Scenario& scenario, std::uint64_t seed);

void write_trials_header(std::ostream& out);
void write_trials_rows(std::ostream& out, int eval_id, const EvalResult& result);

}  // namespace helibo
