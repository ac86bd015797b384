#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "helibo/commands.hpp"
#include "helibo/errors.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> env;
  std::optional<std::string> seed;
  std::optional<std::string> output_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "INI config file");
  cmd->add_option("--set", opts.overrides, "Override a field: section.key=value")
      ->take_all();
  cmd->add_option("--env", opts.env, "clear_day | clear_night | night_rain");
  cmd->add_option("--seed", opts.seed, "Top-level random seed");
  cmd->add_option("-o,--output-dir", opts.output_dir, "Directory for CSV outputs");
}

// File values first, then HELIBO_SEED, then command-line flags.
helibo::RunConfig resolve(const CommonOptions& opts) {
  helibo::RunConfig cfg;
  if (!opts.config_path.empty()) helibo::load_config_file(cfg, opts.config_path);
  helibo::apply_environment(cfg);
  for (const std::string& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw helibo::ConfigError(fmt::format("--set '{}': expected section.key=value", kv));
    }
    helibo::set_field(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.env) helibo::set_field(cfg, "run.env", *opts.env);
  if (opts.seed) helibo::set_field(cfg, "run.seed", *opts.seed);
  if (opts.output_dir) helibo::set_field(cfg, "run.output_dir", *opts.output_dir);
  cfg.validate();
  return cfg;
}

std::vector<helibo::EnvCondition> parse_env_list(const std::string& text) {
  if (text == "all") return {helibo::kAllEnvs.begin(), helibo::kAllEnvs.end()};
  std::vector<helibo::EnvCondition> envs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      envs.push_back(helibo::parse_env(item));
    } catch (const helibo::ConfigError&) {
      throw helibo::ConfigError(fmt::format("--envs: unknown condition '{}'", item));
    }
  }
  return envs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian augmentation search for vision-guided landing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(helibo::kVersion));

  CommonOptions common;

  auto* optimize = app.add_subcommand("optimize", "Run the GP-UCB search for one environment");
  add_common(optimize, common);

  auto* evaluate = app.add_subcommand("evaluate", "Landing success rate at fixed parameters");
  add_common(evaluate, common);
  double scale = 0.0;
  double brightness = 0.0;
  std::string envs = "";
  evaluate->add_option("-S,--scale", scale, "Scale augmentation in [0, 1]")->required();
  evaluate->add_option("-B,--brightness", brightness, "Brightness augmentation in [0, 1]")
      ->required();
  evaluate->add_option("--envs", envs, "Comma list of conditions, or 'all' (default: run.env)");

  auto* uncertainty = app.add_subcommand("uncertainty", "Subsampling-ensemble box spread");
  add_common(uncertainty, common);

  auto* landscape = app.add_subcommand("landscape", "Dump the reference landscape grid");
  add_common(landscape, common);
  std::string observations;
  landscape->add_option("--observations", observations,
                        "observations.csv to turn into a posterior grid");

  auto* convert = app.add_subcommand("convert-labels", "Corner CSV to normalized label files");
  std::string input;
  std::string output;
  double split = 0.0;
  std::uint64_t split_seed = 0;
  convert->add_option("--input", input, "Directory with annotation CSVs")->required();
  convert->add_option("--output", output, "Directory for per-image .txt labels")->required();
  convert->add_option("--split", split, "Train fraction for train.txt/val.txt (e.g. 0.8)");
  convert->add_option("--seed", split_seed, "Shuffle seed for --split");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return helibo::kExitConfig;
  }

  try {
    if (*optimize) {
      helibo::cmd_optimize(resolve(common), std::cout);
    } else if (*evaluate) {
      const helibo::RunConfig cfg = resolve(common);
      const auto env_list =
          envs.empty() ? std::vector<helibo::EnvCondition>{cfg.env} : parse_env_list(envs);
      helibo::cmd_evaluate(cfg, {scale, brightness}, env_list, std::cout);
    } else if (*uncertainty) {
      helibo::cmd_uncertainty(resolve(common), std::cout);
    } else if (*landscape) {
      std::optional<std::filesystem::path> obs;
      if (!observations.empty()) obs = observations;
      helibo::cmd_landscape(resolve(common), obs, std::cout);
    } else if (*convert) {
      helibo::cmd_convert_labels(input, output, split, split_seed, std::cout);
    }
  } catch (const helibo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return helibo::kExitConfig;
  } catch (const helibo::OutOfBounds& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return helibo::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return helibo::kExitRuntime;
  }
  return helibo::kExitOk;
}
