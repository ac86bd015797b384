#include "helibo/detector.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "helibo/errors.hpp"

namespace helibo {

AugParams AugParams::make(double scale, double brightness) {
  AugParams p{scale, brightness};
  if (!p.is_valid()) {
    throw OutOfBounds(fmt::format(
        "augmentation params ({}, {}) outside [0,1]^2", scale, brightness));
  }
  return p;
}

bool AugParams::is_valid() const {
  return scale >= 0.0 && scale <= 1.0 && brightness >= 0.0 && brightness <= 1.0;
}

std::string_view to_string(EnvCondition env) {
  switch (env) {
    case EnvCondition::ClearDay:
      return "clear_day";
    case EnvCondition::ClearNight:
      return "clear_night";
    case EnvCondition::NightRain:
      return "night_rain";
  }
  return "unknown";
}

EnvCondition parse_env(std::string_view text) {
  for (EnvCondition env : kAllEnvs) {
    if (text == to_string(env)) return env;
  }
  throw ConfigError(fmt::format(
      "env: unknown condition '{}' (expected clear_day, clear_night or "
      "night_rain)",
      text));
}

Landscape Landscape::calibrated() {
  Landscape l;
  l.peak(EnvCondition::ClearDay) = {0.62, 0.52, 0.30, 0.97};
  l.peak(EnvCondition::ClearNight) = {0.82, 0.74, 0.20, 0.95};
  l.peak(EnvCondition::NightRain) = {0.74, 0.62, 0.16, 0.88};
  return l;
}

double quality(const AugParams& p, const LandscapePeak& peak) {
  const double ds = p.scale - peak.scale;
  const double db = p.brightness - peak.brightness;
  const double q = peak.q_max *
                   std::exp(-(ds * ds + db * db) / (2.0 * peak.width * peak.width));
  return std::clamp(q, 0.0, 1.0);
}

double quality(const AugParams& p, EnvCondition env, const Landscape& landscape) {
  return quality(p, landscape.peak(env));
}

DetectorModel DetectorModel::single(const AugParams& p,
                                    const Landscape& landscape) {
  DetectorModel m;
  m.params = p;
  m.landscape = landscape;
  return m;
}

double domain_mismatch(EnvCondition train, EnvCondition eval) {
  if (train == eval) return 1.0;
  const auto involves = [&](EnvCondition a, EnvCondition b) {
    return (train == a && eval == b) || (train == b && eval == a);
  };
  if (involves(EnvCondition::ClearDay, EnvCondition::ClearNight)) return 2.5;
  if (involves(EnvCondition::ClearDay, EnvCondition::NightRain)) return 3.5;
  return 1.5;  // night <-> night with rain
}

namespace {

BoundingBox sanitize(BoundingBox b) {
  constexpr double kMinSide = 1e-4;
  constexpr double kMaxSide = 1.0 + 2.0 * BoundingBox::kOverflow;
  b.w = std::clamp(b.w, kMinSide, kMaxSide);
  b.h = std::clamp(b.h, kMinSide, kMaxSide);
  b.cx = std::clamp(b.cx, -BoundingBox::kOverflow + 0.5 * b.w,
                    1.0 + BoundingBox::kOverflow - 0.5 * b.w);
  b.cy = std::clamp(b.cy, -BoundingBox::kOverflow + 0.5 * b.h,
                    1.0 + BoundingBox::kOverflow - 0.5 * b.h);
  return b;
}

}  // namespace

double DetectorModel::quality_in(EnvCondition env) const {
  LandscapePeak peak = landscape.peak(env);
  const double m = domain_mismatch(train_env, env);
  peak.scale += m * peak_offset_scale;
  peak.brightness += m * peak_offset_brightness;
  return quality(params, peak);
}

BoundingBox DetectorModel::biased(const BoundingBox& truth, EnvCondition env) const {
  if (peak_offset_scale == 0.0 && peak_offset_brightness == 0.0) return truth;
  const double m = domain_mismatch(train_env, env);
  BoundingBox b = truth;
  b.cx += m * peak_offset_brightness * truth.w;
  b.cy += m * peak_offset_brightness * truth.h;
  b.w *= 1.0 + m * peak_offset_scale;
  b.h *= 1.0 + m * peak_offset_scale;
  return sanitize(b);
}

double DetectorModel::detect_probability(const BoundingBox& truth,
                                         EnvCondition env) const {
  const double visibility = std::clamp(truth.area() / min_visible_area, 0.0, 1.0);
  return quality_in(env) * visibility;
}


std::optional<Detection> detect(const DetectorModel& model,
                                const std::optional<BoundingBox>& truth,
                                EnvCondition env, Rng& rng) {
  if (!truth) return std::nullopt;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double p = model.detect_probability(*truth, env);
  if (!(uniform(rng) < p)) return std::nullopt;

  const double sd = model.noise * (1.0 - p);
  BoundingBox box = model.biased(*truth, env);
  if (sd > 0.0) {
    box.cx += sd * normal(rng);
    box.cy += sd * normal(rng);
    box.w += sd * normal(rng);
    box.h += sd * normal(rng);
    box = sanitize(box);
  }
  const double confidence = std::clamp(p + 0.05 * normal(rng), 0.0, 1.0);
  return Detection{box, confidence};
}

std::vector<Detection> detect_frame(const DetectorModel& model,
                                    const std::optional<BoundingBox>& truth,
                                    EnvCondition env, Rng& rng) {
  std::vector<Detection> out;
  if (auto d = detect(model, truth, env, rng)) out.push_back(*d);
  if (model.clutter.enabled && model.clutter.rate > 0.0) {
    std::poisson_distribution<int> count(model.clutter.rate);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      BoundingBox b;
      b.w = 0.01 + 0.2 * uniform(rng);
      b.h = 0.01 + 0.2 * uniform(rng);
      b.cx = 0.5 * b.w + (1.0 - b.w) * uniform(rng);
      b.cy = 0.5 * b.h + (1.0 - b.h) * uniform(rng);
      out.push_back({b, model.clutter.max_confidence * uniform(rng)});
    }
  }
  return out;
}

std::vector<DetectorModel> train_ensemble(const AugParams& p,
                                          EnvCondition train_env, int k,
                                          std::uint64_t seed,
                                          double subset_jitter,
                                          const Landscape& landscape) {
  if (k < 2) {
    throw InvalidEnsembleSize(fmt::format("ensemble size {} < 2", k));
  }
  std::vector<DetectorModel> members;
  members.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    DetectorModel m = DetectorModel::single(p, landscape);
    m.train_env = train_env;
    m.seed = derive_seed(seed, "ensemble-member", static_cast<std::uint64_t>(i));
    Rng rng(m.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    m.peak_offset_scale = subset_jitter * normal(rng);
    m.peak_offset_brightness = subset_jitter * normal(rng);
    members.push_back(m);
  }
  return members;
}

EnsembleUncertainty ensemble_uncertainty(std::span<const DetectorModel> models,
                                         const BoundingBox& truth,
                                         EnvCondition env, Rng& rng) {
  const std::uint64_t frame_seed = rng();
  std::vector<BoundingBox> boxes;
  boxes.reserve(models.size());
  for (const DetectorModel& m : models) {
    Rng member_rng(frame_seed);
    if (auto d = detect(m, truth, env, member_rng)) boxes.push_back(d->box);
  }
  return box_spread(boxes);
}

EnsembleUncertainty box_spread(std::span<const BoundingBox> boxes) {
  const int count = static_cast<int>(boxes.size());
  if (count < 2) return EnsembleUncertainty::saturated(count);

  const auto n = static_cast<double>(boxes.size());
  // Shifted by the first sample: identical inputs give exactly zero.
  const auto sample_sd = [&](auto field) {
    const double ref = field(boxes.front());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& b : boxes) {
      const double d = field(b) - ref;
      sum += d;
      sum_sq += d * d;
    }
    return std::sqrt(std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)));
  };
  return {sample_sd([](const BoundingBox& b) { return b.cx; }),
          sample_sd([](const BoundingBox& b) { return b.cy; }),
          sample_sd([](const BoundingBox& b) { return b.w; }),
          sample_sd([](const BoundingBox& b) { return b.h; }), count};
}

void write_landscape_csv(std::ostream& out, const Landscape& landscape,
                         std::span<const EnvCondition> envs, int resolution) {
  out << "# helibo landscape v1\n";
  out << "S,B,env,q\n";
  const double step = resolution > 1 ? 1.0 / (resolution - 1) : 0.0;
  for (EnvCondition env : envs) {
    for (int i = 0; i < resolution; ++i) {
      for (int j = 0; j < resolution; ++j) {
        const AugParams p{i * step, j * step};
        fmt::print(out, "{:.4f},{:.4f},{},{:.6f}\n", p.scale, p.brightness,
                   to_string(env), quality(p, env, landscape));
      }
    }
  }
}

}  // namespace helibo
