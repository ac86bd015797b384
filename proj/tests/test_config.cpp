#include <gtest/gtest.h>

#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "helibo/commands.hpp"
#include "helibo/config.hpp"
#include "helibo/errors.hpp"

using namespace helibo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("helibo_cfg_" + name);
  fs::remove_all(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HELIBO_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig small_run(const fs::path& dir) {
  RunConfig cfg;
  cfg.output_dir = dir;
  cfg.seed = 21;
  cfg.grid_resolution = 21;
  cfg.bo.iterations = 3;
  cfg.bo.grid = 21;
  cfg.scenario.trials.trials_per_eval = 3;
  return cfg;
}

}  // namespace

TEST(Config, SetFieldParsesValues) {
  RunConfig cfg;
  set_field(cfg, "bo.kappa", "1.5");
  set_field(cfg, "run.env", "night_rain");
  set_field(cfg, "tracker.target_rule", "nearest_center");
  set_field(cfg, "controller.kp_z", "0.4");
  EXPECT_EQ(cfg.bo.kappa, 1.5);
  EXPECT_EQ(cfg.env, EnvCondition::NightRain);
  EXPECT_EQ(cfg.scenario.tracker.target_rule, TargetRule::NearestCenter);
  EXPECT_EQ(cfg.scenario.guidance.gains.z.kp, 0.4);
}

TEST(Config, UnknownKeyAndBadValueRejected) {
  RunConfig cfg;
  EXPECT_THROW(set_field(cfg, "bo.kapa", "1"), ConfigError);
  EXPECT_THROW(set_field(cfg, "bo.kappa", "abc"), ConfigError);
  EXPECT_THROW(set_field(cfg, "run.env", "fog"), ConfigError);
}

TEST(Config, ValidateNamesTheField) {
  RunConfig cfg;
  cfg.scenario.trials.trials_per_eval = 0;
  try {
    cfg.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("trials_per_eval"), std::string::npos);
  }
}

TEST(Config, FileLoading) {
  RunConfig cfg;
  std::istringstream in("; comment\n[run]\nenv = clear_night\nseed = 9\n[bo]\niterations = 4\n");
  load_config_stream(cfg, in);
  EXPECT_EQ(cfg.env, EnvCondition::ClearNight);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.bo.iterations, 4);
  std::istringstream bad("[bo]\nmystery = 1\n");
  EXPECT_THROW(load_config_stream(cfg, bad), ConfigError);
}

TEST(Config, ManifestRoundTripsEveryField) {
  RunConfig cfg;
  cfg.seed = 1234;
  cfg.bo.kappa = 1.25;
  cfg.scenario.detector.landscape.peak(EnvCondition::NightRain).width = 0.21;
  cfg.scenario.camera.mount_height_m = 1.5;
  std::stringstream a;
  write_manifest(a, cfg, "test");
  RunConfig back;
  load_config_stream(back, a);
  std::stringstream b;
  write_manifest(b, back, "test");
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(back.seed, 1234u);
}

TEST(Commands, ManifestReplayReproducesOutputs) {
  const fs::path first = scratch("replay1"), second = scratch("replay2");
  std::ostringstream log;
  cmd_optimize(small_run(first), log);
  RunConfig replay;
  load_config_file(replay, first / "run_manifest.ini");
  replay.output_dir = second;
  cmd_optimize(replay, log);
  for (const char* f : {"observations.csv", "contour.csv", "trials.csv"})
    EXPECT_EQ(slurp(first / f), slurp(second / f)) << f;
  fs::remove_all(first);
  fs::remove_all(second);
}

TEST(Commands, ContourStdAtObservedPointsIsSmall) {
  const fs::path dir = scratch("contour");
  std::ostringstream log;
  RunConfig cfg = small_run(dir);
  const auto report = cmd_optimize(cfg, log);
  const GaussianProcess gp(report.data);
  for (const auto& o : report.data.observations)
    EXPECT_LE(gp.predict(o.x).sd, std::sqrt(cfg.bo.noise_var) + 1e-3);
  fs::remove_all(dir);
}

TEST(Commands, LandscapeRowsAndPeaks) {
  const fs::path dir = scratch("landscape");
  RunConfig cfg;
  cfg.output_dir = dir;
  std::ostringstream log;
  cmd_landscape(cfg, std::nullopt, log);
  std::ifstream in(dir / "landscape.csv");
  std::string line;
  std::map<std::string, int> rows;
  std::map<std::string, std::pair<double, std::pair<double, double>>> best;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'S') continue;
    std::istringstream ss(line);
    std::string s, b, env, q;
    std::getline(ss, s, ',');
    std::getline(ss, b, ',');
    std::getline(ss, env, ',');
    std::getline(ss, q, ',');
    ++rows[env];
    auto& cur = best[env];
    if (std::stod(q) > cur.first) cur = {std::stod(q), {std::stod(s), std::stod(b)}};
  }
  for (EnvCondition env : kAllEnvs) {
    const std::string name(to_string(env));
    EXPECT_EQ(rows[name], 10201);
    const auto& pk = Landscape::calibrated().peak(env);
    EXPECT_NEAR(best[name].second.first, pk.scale, 1e-9);
    EXPECT_NEAR(best[name].second.second, pk.brightness, 1e-9);
  }
  fs::remove_all(dir);
}

TEST(Commands, EvaluateRejectsOutOfRangeParams) {
  RunConfig cfg;
  cfg.output_dir = scratch("eval_bad");
  std::ostringstream log;
  EXPECT_THROW(cmd_evaluate(cfg, {1.5, 0.5}, {EnvCondition::ClearDay}, log), ConfigError);
}

TEST(Commands, UncertaintyZeroJitterAndReplay) {
  const fs::path a = scratch("unc_a"), b = scratch("unc_b");
  RunConfig cfg;
  cfg.output_dir = a;
  cfg.uncertainty.frames = 200;
  std::ostringstream log;
  const auto rows = cmd_uncertainty(cfg, log);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rows[0].mean.mean(), rows[1].mean.mean());
  EXPECT_LT(rows[0].mean.mean(), rows[2].mean.mean());
  cfg.output_dir = b;
  cmd_uncertainty(cfg, log);
  EXPECT_EQ(slurp(a / "uncertainty.csv"), slurp(b / "uncertainty.csv"));

  cfg.scenario.detector.subset_jitter = 0.0;
  for (const auto& r : cmd_uncertainty(cfg, log)) EXPECT_EQ(r.mean.mean(), 0.0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  const std::string out = " -o " + dir.string();
  EXPECT_EQ(run_cli("optimize --env bogus" + out), kExitConfig);
  EXPECT_EQ(run_cli("evaluate -S 1.5 -B 0.5" + out), kExitConfig);
  EXPECT_EQ(run_cli("optimize --set bo.nope=1" + out), kExitConfig);
  EXPECT_EQ(run_cli("landscape --set run.grid_resolution=11" + out), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "landscape.csv"));
  EXPECT_TRUE(fs::exists(dir / "run_manifest.ini"));
  fs::remove_all(dir);
}
