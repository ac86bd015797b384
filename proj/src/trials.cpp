#include "helibo/trials.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace helibo {

bool TrialConfig::is_valid() const {
  return init_xy_range >= 0.0 && init_z_min >= 0.0 && init_z_max >= init_z_min &&
         max_steps >= 1 && success_xy > 0.0 && success_z > 0.0 &&
         touchdown_z >= 0.0 && trials_per_eval >= 1 && threads >= 0;
}

DetectorModel DetectorSettings::model_for(const AugParams& p) const {
  DetectorModel m = DetectorModel::single(p, landscape);
  m.noise = noise;
  m.min_visible_area = min_visible_area;
  m.clutter = clutter;
  return m;
}

int EvalResult::successes() const {
  return static_cast<int>(std::count_if(outcomes.begin(), outcomes.end(),
                                        [](const auto& o) { return o.success; }));
}

bool landing_success(const WorldPose& final, const Helipad& pad,
                     const TrialConfig& cfg) {
  const double dx = final.x - pad.center.x;
  const double dy = final.y - pad.center.y;
  const bool horizontal =
      cfg.euclidean ? std::hypot(dx, dy) <= cfg.success_xy
                    : std::abs(dx) <= cfg.success_xy && std::abs(dy) <= cfg.success_xy;
  return horizontal && final.z - pad.center.z <= cfg.success_z;
}

WorldPose sample_initial_pose(const Helipad& pad, const TrialConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> xy(-cfg.init_xy_range, cfg.init_xy_range);
  std::uniform_real_distribution<double> z(cfg.init_z_min, cfg.init_z_max);
  WorldPose p;
  p.x = pad.center.x + xy(rng);
  p.y = pad.center.y + xy(rng);
  p.z = pad.center.z + z(rng);
  return p;
}

TrialOutcome run_trial_from(const DetectorModel& model, EnvCondition env,
                            const Scenario& scenario, const WorldPose& init,
                            std::uint64_t seed, bool record_trace) {
  Rng perception = make_rng(seed, "perception");
  const KinematicsConfig& kin = scenario.kinematics;
  Guidance guidance(scenario.guidance, scenario.camera, scenario.pad.side_m, kin);

  TrialOutcome out;
  out.init = init;
  VehicleState state{init, {}};
  TrackerState tracks;
  const double touchdown = scenario.pad.center.z + scenario.trials.touchdown_z;

  int steps = 0;
  while (steps < scenario.trials.max_steps && state.pose.z > touchdown) {
    const auto truth = project_pad(state.pose, scenario.pad, scenario.camera);
    const std::vector<Detection> dets = detect_frame(model, truth, env, perception);
    TrackerStep ts = step_tracker(tracks, dets, scenario.tracker);
    tracks = std::move(ts.state);
    const auto target = select_target(ts.confirmed, scenario.tracker.target_rule);
    const Velocity cmd =
        guidance.update(target ? std::optional<BoundingBox>(target->box()) : std::nullopt);
    state = step(state, cmd, kin);
    ++steps;
    if (record_trace) {
      out.trace.push_back({state.pose, guidance.last_error(), !dets.empty()});
    }
  }
  out.final = state.pose;
  out.steps_used = steps;
  out.touched_down = state.pose.z <= touchdown;
  out.success = out.touched_down &&
                landing_success(out.final, scenario.pad, scenario.trials);
  return out;
}

TrialOutcome run_trial(const DetectorModel& model, EnvCondition env,
                       const Scenario& scenario, std::uint64_t seed,
                       bool record_trace) {
  Rng start = make_rng(seed, "initial-pose");
  const WorldPose init = sample_initial_pose(scenario.pad, scenario.trials, start);
  return run_trial_from(model, env, scenario, init, seed, record_trace);
}

std::uint64_t trial_seed(std::uint64_t base, int eval_index, int trial_index) {
  return derive_seed(base, "trial", static_cast<std::uint64_t>(eval_index),
                     static_cast<std::uint64_t>(trial_index));
}

EvalResult evaluate_model(const DetectorModel& model, EnvCondition env,
                          const Scenario& scenario, int eval_index) {
  const TrialConfig& cfg = scenario.trials;
  EvalResult result;
  result.params = model.params;
  result.env = env;
  result.outcomes.resize(static_cast<std::size_t>(cfg.trials_per_eval));

  const auto run_one = [&](int i) {
    result.outcomes[static_cast<std::size_t>(i)] =
        run_trial(model, env, scenario, trial_seed(cfg.seed, eval_index, i));
  };
  int workers = cfg.threads == 0
                    ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                    : cfg.threads;
  workers = std::min(workers, cfg.trials_per_eval);
  if (workers <= 1) {
    for (int i = 0; i < cfg.trials_per_eval; ++i) run_one(i);
  } else {
    // One output slot per trial.
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < cfg.trials_per_eval; i += workers) run_one(i);
      });
    }
  }
  result.success_rate =
      static_cast<double>(result.successes()) / static_cast<double>(cfg.trials_per_eval);
  return result;
}

EvalResult evaluate(const AugParams& params, EnvCondition env,
                    const Scenario& scenario, int eval_index) {
  return evaluate_model(scenario.detector.model_for(params), env, scenario,
                        eval_index);
}

double confidence_probe(const DetectorModel& model, EnvCondition env,
                        const Scenario& scenario, std::uint64_t seed) {
  const Helipad& pad = scenario.pad;
  const WorldPose pose{pad.center.x + 40.0, pad.center.y + 40.0, pad.center.z + 120.0};
  const auto truth = project_pad(pose, pad, scenario.camera);
  Rng rng = make_rng(seed, "confidence-probe");
  double total = 0.0;
  for (int i = 0; i < kProbeFrames; ++i) {
    if (auto d = detect(model, truth, env, rng)) total += d->confidence;
  }
  return total / kProbeFrames;
}

void write_trials_header(std::ostream& out) {
  out << "# helibo trials v1\n";
  out << "eval_id,trial_id,env,S,B,init_x,init_y,init_z,final_x,final_y,final_z,"
         "success,steps\n";
}

void write_trials_rows(std::ostream& out, int eval_id, const EvalResult& result) {
  for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
    const TrialOutcome& o = result.outcomes[i];
    fmt::print(out, "{},{},{},{:.6f},{:.6f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{},{}\n",
               eval_id, i, to_string(result.env), result.params.scale,
               result.params.brightness, o.init.x, o.init.y, o.init.z, o.final.x,
               o.final.y, o.final.z, o.success ? 1 : 0, o.steps_used);
  }
}

}  // namespace helibo
