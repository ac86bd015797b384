#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "helibo/geometry.hpp"
#include "helibo/rng.hpp"

namespace helibo {

// Augmentation hyperparameters searched by the optimizer.
struct AugParams {
  double scale = 0.0;
  double brightness = 0.0;

  static AugParams make(double scale, double brightness);
  bool is_valid() const;

  friend bool operator==(const AugParams&, const AugParams&) = default;
};

enum class EnvCondition { ClearDay, ClearNight, NightRain };

inline constexpr std::array<EnvCondition, 3> kAllEnvs{
    EnvCondition::ClearDay, EnvCondition::ClearNight, EnvCondition::NightRain};

std::string_view to_string(EnvCondition env);
// Accepts clear_day | clear_night | night_rain. Throws ConfigError.
EnvCondition parse_env(std::string_view text);

// One Gaussian bump of the reference landscape.
struct LandscapePeak {
  double scale = 0.5;
  double brightness = 0.5;
  double width = 0.25;
  double q_max = 1.0;
};

// Hidden ground truth the optimizer has to rediscover: how well a detector
// trained with given augmentations performs under each environment.
struct Landscape {
  std::array<LandscapePeak, 3> peaks{};

  static Landscape calibrated();

  const LandscapePeak& peak(EnvCondition env) const {
    return peaks[static_cast<std::size_t>(env)];
  }
  LandscapePeak& peak(EnvCondition env) {
    return peaks[static_cast<std::size_t>(env)];
  }
};

double quality(const AugParams& p, const LandscapePeak& peak);
double quality(const AugParams& p, EnvCondition env,
               const Landscape& landscape = Landscape::calibrated());

struct Detection {
  BoundingBox box;
  double confidence = 0.0;
};

struct ClutterConfig {
  bool enabled = false;
  double rate = 0.05;           // expected spurious boxes per frame
  double max_confidence = 0.3;
};

// Surrogate detector. A model trained on a data subset carries a small
// offset of its landscape peak; the offset grows when the model is used in
// an environment it was not trained for.
struct DetectorModel {
  AugParams params{};
  Landscape landscape = Landscape::calibrated();
  EnvCondition train_env = EnvCondition::ClearDay;
  double peak_offset_scale = 0.0;
  double peak_offset_brightness = 0.0;
  double noise = 0.01;          // box jitter scale, normalized units
  double min_visible_area = 6.0e-5;
  std::uint64_t seed = 0;
  ClutterConfig clutter{};

  static DetectorModel single(const AugParams& p,
                              const Landscape& landscape = Landscape::calibrated());

  // Landscape quality of this member when operated under `env`.
  double quality_in(EnvCondition env) const;
  // Systematic localization error of a subset-trained member: the scale
  // offset distorts the box size, the brightness offset shifts its center.
  BoundingBox biased(const BoundingBox& truth, EnvCondition env) const;
  // Detection probability for a target box, quality times visibility.
  double detect_probability(const BoundingBox& truth, EnvCondition env) const;
};

// Amplification of the subset peak jitter when the operating environment
// differs from the training environment.
double domain_mismatch(EnvCondition train, EnvCondition eval);

std::optional<Detection> detect(const DetectorModel& model,
                                const std::optional<BoundingBox>& truth,
                                EnvCondition env, Rng& rng);

// detect() plus spurious boxes when clutter is enabled.
std::vector<Detection> detect_frame(const DetectorModel& model,
                                    const std::optional<BoundingBox>& truth,
                                    EnvCondition env, Rng& rng);

inline constexpr double kSubsetJitter = 0.03;

// Simulates k detectors trained on k-fold subsamples. Throws
// InvalidEnsembleSize when k < 2.
std::vector<DetectorModel> train_ensemble(
    const AugParams& p, EnvCondition train_env, int k, std::uint64_t seed,
    double subset_jitter = kSubsetJitter,
    const Landscape& landscape = Landscape::calibrated());

struct EnsembleUncertainty {
  double sd_cx = 0.0;
  double sd_cy = 0.0;
  double sd_w = 0.0;
  double sd_h = 0.0;
  int detections = 0;  // members that reported a box

  double mean() const { return 0.25 * (sd_cx + sd_cy + sd_w + sd_h); }
  static EnsembleUncertainty saturated(int detections = 0) {
    return {1.0, 1.0, 1.0, 1.0, detections};
  }
};

// Per-coordinate sample standard deviation (n - 1). Fewer than two boxes give
// the saturated sentinel.
EnsembleUncertainty box_spread(std::span<const BoundingBox> boxes);

// Spread of the boxes reported by the members that fire.
// All members see the same random draws, so identical members agree exactly.
EnsembleUncertainty ensemble_uncertainty(std::span<const DetectorModel> models,
                                         const BoundingBox& truth,
                                         EnvCondition env, Rng& rng);

// Grid dump of the reference landscape: S,B,env,q.
void write_landscape_csv(std::ostream& out, const Landscape& landscape,
                         std::span<const EnvCondition> envs, int resolution);

}  // namespace helibo
