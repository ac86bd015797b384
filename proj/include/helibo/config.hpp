#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "helibo/bayesopt.hpp"
#include "helibo/detector.hpp"
#include "helibo/trials.hpp"

namespace helibo {

inline constexpr std::string_view kVersion = "1.0.0";

struct UncertaintyConfig {
  AugParams params{0.5, 0.5};
  EnvCondition train_env = EnvCondition::ClearDay;
  int members = 5;
  int frames = 1000;
};

// Fully resolved configuration of one run. Every field is reachable as
// `section.key` in the config file and through --set overrides.
struct RunConfig {
  EnvCondition env = EnvCondition::ClearDay;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  int grid_resolution = 101;
  Scenario scenario{};
  BoConfig bo{};
  UncertaintyConfig uncertainty{};

  // Throws ConfigError naming the first offending field.
  void validate() const;
};

// Sets one `section.key` to a textual value. Unknown keys and unparsable
// values throw ConfigError.
void set_field(RunConfig& cfg, std::string_view key, std::string_view value);
std::vector<std::string> field_names();

// Reads an INI-style file (sections, key = value) on top of `cfg`.
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);
void load_config_stream(RunConfig& cfg, std::istream& in);

// Every field, in a form load_config_stream reads back to the same config.
void write_manifest(std::ostream& out, const RunConfig& cfg,
                    std::string_view command);

// Applies HELIBO_SEED when set.
void apply_environment(RunConfig& cfg);

}  // namespace helibo
