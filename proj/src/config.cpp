#include "helibo/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "helibo/errors.hpp"

namespace helibo {

namespace {

struct Field {
  std::string name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            std::string_view expected) {
  throw ConfigError(fmt::format("{}: cannot parse '{}' as {}", key, value, expected));
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    bad_value(key, text, "a number");
  }
  return v;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view text) {
  Int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    bad_value(key, text, "an integer");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  bad_value(key, text, "true or false");
}

TargetRule parse_target_rule(std::string_view key, std::string_view text) {
  if (text == "largest_area") return TargetRule::LargestArea;
  if (text == "nearest_center") return TargetRule::NearestCenter;
  bad_value(key, text, "largest_area or nearest_center");
}

std::string_view to_string(TargetRule rule) {
  return rule == TargetRule::LargestArea ? "largest_area" : "nearest_center";
}

EnvCondition parse_env_field(std::string_view key, std::string_view text) {
  try {
    return parse_env(text);
  } catch (const ConfigError&) {
    bad_value(key, text, "clear_day, clear_night or night_rain");
  }
}

// `proj` is a generic lambda returning a reference into the config, so one
// projection serves both the setter and the getter.
template <class Proj>
Field real(std::string name, Proj proj) {
  return {name,
          [name, proj](RunConfig& c, std::string_view v) { proj(c) = parse_double(name, v); },
          [proj](const RunConfig& c) { return fmt::format("{}", proj(c)); }};
}

template <class Proj>
Field integer(std::string name, Proj proj) {
  return {name,
          [name, proj](RunConfig& c, std::string_view v) {
            auto& ref = proj(c);
            ref = parse_int<std::remove_reference_t<decltype(ref)>>(name, v);
          },
          [proj](const RunConfig& c) { return fmt::format("{}", proj(c)); }};
}

template <class Proj>
Field boolean(std::string name, Proj proj) {
  return {name,
          [name, proj](RunConfig& c, std::string_view v) { proj(c) = parse_bool(name, v); },
          [proj](const RunConfig& c) { return std::string(proj(c) ? "true" : "false"); }};
}

template <class Proj>
Field env_field(std::string name, Proj proj) {
  return {name,
          [name, proj](RunConfig& c, std::string_view v) { proj(c) = parse_env_field(name, v); },
          [proj](const RunConfig& c) { return std::string(to_string(proj(c))); }};
}

void add_axis(std::vector<Field>& f, const std::string& axis,
              AxisGains& (*pick)(RunConfig&)) {
  const auto cpick = [pick](const RunConfig& c) -> const AxisGains& {
    return pick(const_cast<RunConfig&>(c));
  };
  f.push_back({"controller.kp_" + axis,
               [pick, axis](RunConfig& c, std::string_view v) {
                 pick(c).kp = parse_double("controller.kp_" + axis, v);
               },
               [cpick](const RunConfig& c) { return fmt::format("{}", cpick(c).kp); }});
  f.push_back({"controller.ki_" + axis,
               [pick, axis](RunConfig& c, std::string_view v) {
                 pick(c).ki = parse_double("controller.ki_" + axis, v);
               },
               [cpick](const RunConfig& c) { return fmt::format("{}", cpick(c).ki); }});
  f.push_back({"controller.kd_" + axis,
               [pick, axis](RunConfig& c, std::string_view v) {
                 pick(c).kd = parse_double("controller.kd_" + axis, v);
               },
               [cpick](const RunConfig& c) { return fmt::format("{}", cpick(c).kd); }});
}

void add_peak(std::vector<Field>& f, EnvCondition env) {
  const std::string prefix = fmt::format("landscape.{}_", to_string(env));
  const auto idx = static_cast<std::size_t>(env);
  f.push_back(real(prefix + "scale", [idx](auto& c) -> auto& {
    return c.scenario.detector.landscape.peaks[idx].scale;
  }));
  f.push_back(real(prefix + "brightness", [idx](auto& c) -> auto& {
    return c.scenario.detector.landscape.peaks[idx].brightness;
  }));
  f.push_back(real(prefix + "width", [idx](auto& c) -> auto& {
    return c.scenario.detector.landscape.peaks[idx].width;
  }));
  f.push_back(real(prefix + "q_max", [idx](auto& c) -> auto& {
    return c.scenario.detector.landscape.peaks[idx].q_max;
  }));
}

const std::vector<Field>& registry() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(env_field("run.env", [](auto& c) -> auto& { return c.env; }));
    f.push_back(integer("run.seed", [](auto& c) -> auto& { return c.seed; }));
    f.push_back({"run.output_dir",
                 [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); },
                 [](const RunConfig& c) { return c.output_dir.string(); }});
    f.push_back(integer("run.grid_resolution",
                        [](auto& c) -> auto& { return c.grid_resolution; }));

    f.push_back(real("bo.kappa", [](auto& c) -> auto& { return c.bo.kappa; }));
    f.push_back(real("bo.epsilon", [](auto& c) -> auto& { return c.bo.epsilon; }));
    f.push_back(integer("bo.iterations", [](auto& c) -> auto& { return c.bo.iterations; }));
    f.push_back(integer("bo.initial_samples",
                        [](auto& c) -> auto& { return c.bo.initial_samples; }));
    f.push_back(real("bo.success_threshold",
                     [](auto& c) -> auto& { return c.bo.success_threshold; }));
    f.push_back(boolean("bo.refit", [](auto& c) -> auto& { return c.bo.refit; }));
    f.push_back({"bo.kernel",
                 [](RunConfig& c, std::string_view v) { c.bo.kernel.family = parse_kernel(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.bo.kernel.family)); }});
    f.push_back(real("bo.length_scale",
                     [](auto& c) -> auto& { return c.bo.kernel.length_scale; }));
    f.push_back(real("bo.signal_var", [](auto& c) -> auto& { return c.bo.kernel.signal_var; }));
    f.push_back(real("bo.noise_var", [](auto& c) -> auto& { return c.bo.noise_var; }));
    f.push_back(integer("bo.acquisition_grid", [](auto& c) -> auto& { return c.bo.grid; }));

    f.push_back(real("trials.xy_range",
                     [](auto& c) -> auto& { return c.scenario.trials.init_xy_range; }));
    f.push_back(real("trials.z_min", [](auto& c) -> auto& { return c.scenario.trials.init_z_min; }));
    f.push_back(real("trials.z_max", [](auto& c) -> auto& { return c.scenario.trials.init_z_max; }));
    f.push_back(integer("trials.max_steps",
                        [](auto& c) -> auto& { return c.scenario.trials.max_steps; }));
    f.push_back(real("trials.success_xy",
                     [](auto& c) -> auto& { return c.scenario.trials.success_xy; }));
    f.push_back(real("trials.success_z",
                     [](auto& c) -> auto& { return c.scenario.trials.success_z; }));
    f.push_back(real("trials.touchdown_z",
                     [](auto& c) -> auto& { return c.scenario.trials.touchdown_z; }));
    f.push_back(boolean("trials.euclidean",
                        [](auto& c) -> auto& { return c.scenario.trials.euclidean; }));
    f.push_back(integer("trials.trials_per_eval",
                        [](auto& c) -> auto& { return c.scenario.trials.trials_per_eval; }));
    f.push_back(integer("trials.threads",
                        [](auto& c) -> auto& { return c.scenario.trials.threads; }));

    f.push_back(real("kinematics.dt", [](auto& c) -> auto& { return c.scenario.kinematics.dt; }));
    f.push_back(real("kinematics.tau", [](auto& c) -> auto& { return c.scenario.kinematics.tau; }));
    f.push_back(real("kinematics.v_max_xy",
                     [](auto& c) -> auto& { return c.scenario.kinematics.v_max_xy; }));
    f.push_back(real("kinematics.v_max_z",
                     [](auto& c) -> auto& { return c.scenario.kinematics.v_max_z; }));

    add_axis(f, "x", [](RunConfig& c) -> AxisGains& { return c.scenario.guidance.gains.x; });
    add_axis(f, "y", [](RunConfig& c) -> AxisGains& { return c.scenario.guidance.gains.y; });
    add_axis(f, "z", [](RunConfig& c) -> AxisGains& { return c.scenario.guidance.gains.z; });
    f.push_back(real("controller.i_max", [](auto& c) -> auto& { return c.scenario.guidance.i_max; }));
    f.push_back(boolean("controller.metric",
                        [](auto& c) -> auto& { return c.scenario.guidance.metric; }));
    f.push_back(integer("controller.hold_frames",
                        [](auto& c) -> auto& { return c.scenario.guidance.hold_frames; }));
    f.push_back(boolean("controller.anti_windup",
                        [](auto& c) -> auto& { return c.scenario.guidance.anti_windup; }));

    f.push_back(real("tracker.iou_threshold",
                     [](auto& c) -> auto& { return c.scenario.tracker.iou_threshold; }));
    f.push_back(integer("tracker.max_age", [](auto& c) -> auto& { return c.scenario.tracker.max_age; }));
    f.push_back(integer("tracker.min_hits",
                        [](auto& c) -> auto& { return c.scenario.tracker.min_hits; }));
    f.push_back({"tracker.target_rule",
                 [](RunConfig& c, std::string_view v) {
                   c.scenario.tracker.target_rule = parse_target_rule("tracker.target_rule", v);
                 },
                 [](const RunConfig& c) {
                   return std::string(to_string(c.scenario.tracker.target_rule));
                 }});

    f.push_back(real("detector.noise", [](auto& c) -> auto& { return c.scenario.detector.noise; }));
    f.push_back(real("detector.min_visible_area",
                     [](auto& c) -> auto& { return c.scenario.detector.min_visible_area; }));
    f.push_back(boolean("detector.clutter",
                        [](auto& c) -> auto& { return c.scenario.detector.clutter.enabled; }));
    f.push_back(real("detector.clutter_rate",
                     [](auto& c) -> auto& { return c.scenario.detector.clutter.rate; }));
    f.push_back(real("detector.clutter_max_confidence",
                     [](auto& c) -> auto& { return c.scenario.detector.clutter.max_confidence; }));
    f.push_back(real("detector.subset_jitter",
                     [](auto& c) -> auto& { return c.scenario.detector.subset_jitter; }));

    f.push_back(real("camera.fov_deg", [](auto& c) -> auto& { return c.scenario.camera.fov_deg; }));
    f.push_back(integer("camera.image_px", [](auto& c) -> auto& { return c.scenario.camera.image_px; }));
    f.push_back(real("camera.mount_height",
                     [](auto& c) -> auto& { return c.scenario.camera.mount_height_m; }));
    f.push_back({"camera.center_side",
                 [](RunConfig& c, std::string_view v) {
                   const double side = parse_double("camera.center_side", v);
                   c.scenario.camera.center_box.w = side;
                   c.scenario.camera.center_box.h = side;
                 },
                 [](const RunConfig& c) { return fmt::format("{}", c.scenario.camera.center_box.w); }});

    f.push_back(real("pad.side", [](auto& c) -> auto& { return c.scenario.pad.side_m; }));
    f.push_back(real("pad.x", [](auto& c) -> auto& { return c.scenario.pad.center.x; }));
    f.push_back(real("pad.y", [](auto& c) -> auto& { return c.scenario.pad.center.y; }));

    for (EnvCondition env : kAllEnvs) add_peak(f, env);

    f.push_back(real("uncertainty.scale", [](auto& c) -> auto& { return c.uncertainty.params.scale; }));
    f.push_back(real("uncertainty.brightness",
                     [](auto& c) -> auto& { return c.uncertainty.params.brightness; }));
    f.push_back(env_field("uncertainty.train_env",
                          [](auto& c) -> auto& { return c.uncertainty.train_env; }));
    f.push_back(integer("uncertainty.members", [](auto& c) -> auto& { return c.uncertainty.members; }));
    f.push_back(integer("uncertainty.frames", [](auto& c) -> auto& { return c.uncertainty.frames; }));
    return f;
  }();
  return fields;
}

void require(bool ok, std::string_view field, std::string_view rule) {
  if (!ok) throw ConfigError(fmt::format("{}: must satisfy {}", field, rule));
}

}  // namespace

void set_field(RunConfig& cfg, std::string_view key, std::string_view value) {
  for (const Field& f : registry()) {
    if (f.name == key) {
      f.set(cfg, value);
      return;
    }
  }
  throw ConfigError(fmt::format("{}: unknown configuration key", key));
}

std::vector<std::string> field_names() {
  std::vector<std::string> names;
  for (const Field& f : registry()) names.push_back(f.name);
  return names;
}

void RunConfig::validate() const {
  const Scenario& s = scenario;
  require(grid_resolution >= 2, "run.grid_resolution", ">= 2");
  require(bo.kappa >= 0.0, "bo.kappa", ">= 0");
  require(bo.epsilon >= 0.0, "bo.epsilon", ">= 0");
  require(bo.iterations >= 1, "bo.iterations", ">= 1");
  require(bo.initial_samples >= 1, "bo.initial_samples", ">= 1");
  require(bo.kernel.length_scale > 0.0, "bo.length_scale", "> 0");
  require(bo.kernel.signal_var > 0.0, "bo.signal_var", "> 0");
  require(bo.noise_var >= 0.0, "bo.noise_var", ">= 0");
  require(bo.grid >= 2, "bo.acquisition_grid", ">= 2");

  const TrialConfig& t = s.trials;
  require(t.init_xy_range >= 0.0, "trials.xy_range", ">= 0");
  require(t.init_z_min >= 0.0, "trials.z_min", ">= 0");
  require(t.init_z_max >= t.init_z_min, "trials.z_max", ">= trials.z_min");
  require(t.max_steps >= 1, "trials.max_steps", ">= 1");
  require(t.success_xy > 0.0, "trials.success_xy", "> 0");
  require(t.success_z > 0.0, "trials.success_z", "> 0");
  require(t.touchdown_z >= 0.0, "trials.touchdown_z", ">= 0");
  require(t.trials_per_eval >= 1, "trials.trials_per_eval", ">= 1");
  require(t.threads >= 0, "trials.threads", ">= 0");

  const KinematicsConfig& k = s.kinematics;
  require(k.dt > 0.0, "kinematics.dt", "> 0");
  require(k.tau >= 0.0, "kinematics.tau", ">= 0");
  require(k.v_max_xy > 0.0, "kinematics.v_max_xy", "> 0");
  require(k.v_max_z > 0.0, "kinematics.v_max_z", "> 0");

  require(s.guidance.gains.is_valid(), "controller.gains", "all gains >= 0");
  require(s.guidance.i_max > 0.0, "controller.i_max", "> 0");
  require(s.guidance.hold_frames >= 0, "controller.hold_frames", ">= 0");

  require(s.tracker.iou_threshold > 0.0 && s.tracker.iou_threshold < 1.0,
          "tracker.iou_threshold", "0 < value < 1");
  require(s.tracker.max_age >= 1, "tracker.max_age", ">= 1");
  require(s.tracker.min_hits >= 1, "tracker.min_hits", ">= 1");

  require(s.detector.noise >= 0.0, "detector.noise", ">= 0");
  require(s.detector.min_visible_area > 0.0, "detector.min_visible_area", "> 0");
  require(s.detector.clutter.rate >= 0.0, "detector.clutter_rate", ">= 0");
  require(s.detector.clutter.max_confidence >= 0.0 && s.detector.clutter.max_confidence <= 1.0,
          "detector.clutter_max_confidence", "within [0, 1]");
  require(s.detector.subset_jitter >= 0.0, "detector.subset_jitter", ">= 0");

  require(s.camera.fov_deg > 0.0 && s.camera.fov_deg < 180.0, "camera.fov_deg", "0 < value < 180");
  require(s.camera.image_px > 0, "camera.image_px", "> 0");
  require(s.camera.mount_height_m >= 0.0, "camera.mount_height", ">= 0");
  require(s.camera.center_box.is_valid(), "camera.center_side", "a valid centered box side");
  require(s.pad.side_m > 0.0, "pad.side", "> 0");
  require(s.pad.operable_with(s.camera), "pad.side",
          "pad area below the center-box footprint at touchdown");

  for (EnvCondition env : kAllEnvs) {
    const LandscapePeak& p = s.detector.landscape.peak(env);
    const std::string prefix = fmt::format("landscape.{}_", to_string(env));
    require(p.width > 0.0, prefix + "width", "> 0");
    require(p.q_max >= 0.0 && p.q_max <= 1.0, prefix + "q_max", "within [0, 1]");
  }

  require(uncertainty.params.is_valid(), "uncertainty.scale/brightness", "within [0, 1]");
  require(uncertainty.members >= 2, "uncertainty.members", ">= 2");
  require(uncertainty.frames >= 1, "uncertainty.frames", ">= 1");
}

void load_config_stream(RunConfig& cfg, std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config: {}", e.message()));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(fmt::format("{}: key outside of any section", section));
    }
    for (const auto& [key, value] : body) {
      set_field(cfg, section + "." + key, value.data());
    }
  }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("config: cannot open '{}'", path.string()));
  load_config_stream(cfg, in);
}

void write_manifest(std::ostream& out, const RunConfig& cfg, std::string_view command) {
  fmt::print(out, "# helibo run manifest v1\n# version: {}\n# command: {}\n", kVersion,
             command);
  std::string section;
  for (const Field& f : registry()) {
    const auto dot = f.name.find('.');
    const std::string sec = f.name.substr(0, dot);
    if (sec != section) {
      fmt::print(out, "{}[{}]\n", section.empty() ? "" : "\n", sec);
      section = sec;
    }
    fmt::print(out, "{} = {}\n", f.name.substr(dot + 1), f.get(cfg));
  }
}

void apply_environment(RunConfig& cfg) {
  if (const char* seed = std::getenv("HELIBO_SEED")) {
    set_field(cfg, "run.seed", seed);
  }
}

}  // namespace helibo
