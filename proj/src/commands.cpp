#include "helibo/commands.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "helibo/errors.hpp"

namespace helibo {

namespace {

std::ofstream open_output(const std::filesystem::path& dir, std::string_view name) {
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void write_manifest_file(const RunConfig& cfg, std::string_view command) {
  auto out = open_output(cfg.output_dir, "run_manifest.ini");
  write_manifest(out, cfg, command);
}

Scenario seeded_scenario(const RunConfig& cfg) {
  Scenario s = cfg.scenario;
  s.trials.seed = derive_seed(cfg.seed, "trials");
  return s;
}

}  // namespace

OptimizationReport cmd_optimize(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Scenario scenario = seeded_scenario(cfg);
  std::vector<EvalResult> evals;
  const Objective objective = [&](const AugParams& p, int eval_index) {
    evals.push_back(evaluate(p, cfg.env, scenario, eval_index));
    const EvalResult& r = evals.back();
    fmt::print(log, "eval {:2d}  S={:.4f} B={:.4f}  success={:.2f}\n", eval_index,
               p.scale, p.brightness, r.success_rate);
    return r.success_rate;
  };
  const OptimizationReport report =
      optimize(objective, cfg.bo, derive_seed(cfg.seed, "bayesopt"));

  write_manifest_file(cfg, "optimize");
  {
    auto out = open_output(cfg.output_dir, "observations.csv");
    write_observations_csv(out, report);
  }
  {
    auto out = open_output(cfg.output_dir, "contour.csv");
    write_contour_csv(out, report.data, cfg.grid_resolution);
  }
  {
    auto out = open_output(cfg.output_dir, "trials.csv");
    write_trials_header(out);
    for (std::size_t i = 0; i < evals.size(); ++i) {
      write_trials_rows(out, static_cast<int>(i), evals[i]);
    }
  }
  fmt::print(log, "{}: best S={:.4f} B={:.4f} success={:.2f} after {} evaluations ({})\n",
             to_string(cfg.env), report.best.scale, report.best.brightness,
             report.best_y, report.history.size(), to_string(report.stop_reason));
  return report;
}

std::vector<EvalResult> cmd_evaluate(const RunConfig& cfg, const AugParams& params,
                                     const std::vector<EnvCondition>& envs,
                                     std::ostream& log) {
  cfg.validate();
  if (!params.is_valid()) {
    throw ConfigError(fmt::format("scale/brightness: ({}, {}) outside [0, 1]",
                                  params.scale, params.brightness));
  }
  const Scenario scenario = seeded_scenario(cfg);
  std::vector<EvalResult> results;
  for (EnvCondition env : envs) {
    results.push_back(evaluate(params, env, scenario, static_cast<int>(env)));
    fmt::print(log, "{:<12} S={:.4f} B={:.4f}  success={:.2f} ({}/{})\n", to_string(env),
               params.scale, params.brightness, results.back().success_rate,
               results.back().successes(), scenario.trials.trials_per_eval);
  }
  write_manifest_file(cfg, "evaluate");
  auto out = open_output(cfg.output_dir, "trials.csv");
  write_trials_header(out);
  for (const EvalResult& r : results) write_trials_rows(out, static_cast<int>(r.env), r);
  return results;
}

std::vector<UncertaintyRow> cmd_uncertainty(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const UncertaintyConfig& u = cfg.uncertainty;
  const Scenario& s = cfg.scenario;
  std::vector<DetectorModel> members =
      train_ensemble(u.params, u.train_env, u.members, derive_seed(cfg.seed, "ensemble"),
                     s.detector.subset_jitter, s.detector.landscape);
  for (DetectorModel& m : members) {
    m.noise = s.detector.noise;
    m.min_visible_area = s.detector.min_visible_area;
  }

  std::vector<UncertaintyRow> rows;
  for (EnvCondition env : kAllEnvs) {
    EnsembleUncertainty sum;
    int counted = 0;
    int saturated = 0;
    for (int frame = 0; frame < u.frames; ++frame) {
      // Same poses and draws for every environment.
      Rng pose_rng = make_rng(cfg.seed, "uncertainty-pose", static_cast<std::uint64_t>(frame));
      std::optional<BoundingBox> truth;
      while (!truth) {
        truth = project_pad(sample_initial_pose(s.pad, s.trials, pose_rng), s.pad, s.camera);
      }
      Rng rng = make_rng(cfg.seed, "uncertainty-frame", static_cast<std::uint64_t>(frame));
      const EnsembleUncertainty e = ensemble_uncertainty(members, *truth, env, rng);
      // Only frames with a defined sample sd enter the average.
      if (e.detections == 1) ++saturated;
      if (e.detections < 2) continue;
      ++counted;
      sum.sd_cx += e.sd_cx;
      sum.sd_cy += e.sd_cy;
      sum.sd_w += e.sd_w;
      sum.sd_h += e.sd_h;
    }
    const double n = counted;
    rows.push_back({env, counted == 0 ? EnsembleUncertainty::saturated()
                                      : EnsembleUncertainty{sum.sd_cx / n, sum.sd_cy / n,
                                                            sum.sd_w / n, sum.sd_h / n,
                                                            counted}});
    fmt::print(log,
               "{:<12} mean sd cx={:.6f} cy={:.6f} w={:.6f} h={:.6f}  "
               "({} frames, {} single-detection)\n",
               to_string(env), rows.back().mean.sd_cx, rows.back().mean.sd_cy,
               rows.back().mean.sd_w, rows.back().mean.sd_h, counted, saturated);
  }

  write_manifest_file(cfg, "uncertainty");
  auto out = open_output(cfg.output_dir, "uncertainty.csv");
  out << "# helibo uncertainty v1\n";
  out << "env,sd_cx,sd_cy,sd_w,sd_h\n";
  for (const UncertaintyRow& r : rows) {
    fmt::print(out, "{},{:.8f},{:.8f},{:.8f},{:.8f}\n", to_string(r.env), r.mean.sd_cx,
               r.mean.sd_cy, r.mean.sd_w, r.mean.sd_h);
  }
  return rows;
}

void cmd_landscape(const RunConfig& cfg,
                   const std::optional<std::filesystem::path>& observations,
                   std::ostream& log) {
  cfg.validate();
  {
    auto out = open_output(cfg.output_dir, "landscape.csv");
    write_landscape_csv(out, cfg.scenario.detector.landscape, kAllEnvs, cfg.grid_resolution);
  }
  fmt::print(log, "landscape.csv: {} rows per environment\n",
             cfg.grid_resolution * cfg.grid_resolution);
  if (observations) {
    std::ifstream in(*observations);
    if (!in) {
      throw ConfigError(fmt::format("observations: cannot open '{}'", observations->string()));
    }
    const GpDataset data = read_observations_csv(in, cfg.bo.kernel, cfg.bo.noise_var);
    auto out = open_output(cfg.output_dir, "contour.csv");
    write_contour_csv(out, data, cfg.grid_resolution);
    fmt::print(log, "contour.csv: posterior over {} observations\n", data.size());
  }
  write_manifest_file(cfg, "landscape");
}

ConvertSummary cmd_convert_labels(const std::filesystem::path& input,
                                  const std::filesystem::path& output,
                                  double train_fraction, std::uint64_t seed,
                                  std::ostream& log) {
  ConvertSummary s = convert_directory(input, output, train_fraction, seed);
  fmt::print(log, "converted {} objects in {} images\n", s.objects, s.images);
  if (!s.train.empty() || !s.val.empty()) {
    fmt::print(log, "split: {} train / {} val\n", s.train.size(), s.val.size());
  }
  return s;
}

}  // namespace helibo
