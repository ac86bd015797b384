#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "helibo/detector.hpp"
#include "helibo/errors.hpp"

using namespace helibo;

namespace {

double closed_form(double s, double b, double s0, double b0, double w, double qmax) {
  return qmax * std::exp(-((s - s0) * (s - s0) + (b - b0) * (b - b0)) / (2 * w * w));
}

Landscape flat_peak(double q_max) {
  Landscape l = Landscape::calibrated();
  for (auto& p : l.peaks) p = {0.5, 0.5, 0.25, q_max};
  return l;
}

const BoundingBox kTruth{0.5, 0.5, 0.1, 0.1};

}  // namespace

TEST(Quality, PeakGivesQmax) {
  const Landscape l = Landscape::calibrated();
  for (EnvCondition env : kAllEnvs) {
    const auto& pk = l.peak(env);
    EXPECT_DOUBLE_EQ(quality({pk.scale, pk.brightness}, env), pk.q_max);
  }
}

TEST(Quality, ReportedOperatingPointOnClearDay) {
  const double expected = closed_form(0.77, 0.66, 0.62, 0.52, 0.30, 0.97);
  EXPECT_NEAR(expected, 0.767706, 1e-6);
  EXPECT_NEAR(quality({0.77, 0.66}, EnvCondition::ClearDay), expected, 1e-12);
}

TEST(Quality, AnalyticGradientMatchesFiniteDifference) {
  const LandscapePeak pk{0.62, 0.52, 0.30, 0.97};
  const double h = 1e-6;
  for (double s : {0.1, 0.5, 0.9}) {
    for (double b : {0.2, 0.7}) {
      const double q = quality({s, b}, pk);
      const double ds = -(s - pk.scale) / (pk.width * pk.width) * q;
      const double db = -(b - pk.brightness) / (pk.width * pk.width) * q;
      EXPECT_NEAR((quality({s + h, b}, pk) - quality({s - h, b}, pk)) / (2 * h), ds, 1e-7);
      EXPECT_NEAR((quality({s, b + h}, pk) - quality({s, b - h}, pk)) / (2 * h), db, 1e-7);
    }
  }
}

TEST(Quality, StaysInUnitInterval) {
  Rng rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    for (EnvCondition env : kAllEnvs) {
      const double q = quality({u(rng), u(rng)}, env);
      EXPECT_GE(q, 0.0);
      EXPECT_LE(q, 1.0);
    }
  }
}

TEST(AugParamsTest, OutOfRangeRejected) {
  EXPECT_THROW(AugParams::make(1.5, 0.5), OutOfBounds);
  EXPECT_THROW(AugParams::make(0.5, -0.01), OutOfBounds);
  EXPECT_NO_THROW(AugParams::make(1.0, 0.0));
}

TEST(Env, ParseRoundTrip) {
  for (EnvCondition env : kAllEnvs) EXPECT_EQ(parse_env(to_string(env)), env);
  EXPECT_THROW(parse_env("foggy"), ConfigError);
}

TEST(Detect, NoTruthNoDetection) {
  Rng rng(1);
  EXPECT_FALSE(detect(DetectorModel::single({0.5, 0.5}, flat_peak(1.0)),
                      std::nullopt, EnvCondition::ClearDay, rng));
}

TEST(Detect, PerfectDetectorReturnsTruth) {
  Rng rng(1);
  const auto model = DetectorModel::single({0.5, 0.5}, flat_peak(1.0));
  for (int i = 0; i < 100; ++i) {
    const auto d = detect(model, kTruth, EnvCondition::ClearDay, rng);
    ASSERT_TRUE(d);
    EXPECT_EQ(d->box, kTruth);
    EXPECT_GE(d->confidence, 0.8);
  }
}

TEST(Detect, FiringRateMatchesProbability) {
  Rng rng(2024);
  const auto model = DetectorModel::single({0.5, 0.5}, flat_peak(0.7));
  ASSERT_NEAR(model.detect_probability(kTruth, EnvCondition::ClearDay), 0.7, 1e-12);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto d = detect(model, kTruth, EnvCondition::ClearDay, rng);
    if (d) {
      ++hits;
      EXPECT_GE(d->confidence, 0.0);
      EXPECT_LE(d->confidence, 1.0);
      EXPECT_TRUE(d->box.is_valid());
    }
  }
  EXPECT_NEAR(hits / 10000.0, 0.7, 0.015);
}

TEST(Detect, SmallBoxesAreHarderToSee) {
  const auto model = DetectorModel::single({0.62, 0.52});
  double prev = 2.0;
  for (double side : {0.1, 0.008, 0.006, 0.004, 0.002}) {
    const double p = model.detect_probability({0.5, 0.5, side, side}, EnvCondition::ClearDay);
    EXPECT_LE(p, prev);
    prev = p;
  }
  EXPECT_LT(prev, 0.1);
}

TEST(Detect, QualityZeroNeverFires) {
  Rng rng(5);
  const auto model = DetectorModel::single({0.5, 0.5}, flat_peak(0.0));
  for (int i = 0; i < 1000; ++i)
    EXPECT_FALSE(detect(model, kTruth, EnvCondition::ClearDay, rng));
}

TEST(Detect, ClutterAddsLowConfidenceBoxes) {
  auto model = DetectorModel::single({0.5, 0.5}, flat_peak(0.0));
  model.clutter = {true, 2.0, 0.3};
  Rng rng(9);
  int total = 0;
  for (int i = 0; i < 500; ++i) {
    for (const auto& d : detect_frame(model, kTruth, EnvCondition::ClearDay, rng)) {
      ++total;
      EXPECT_LE(d.confidence, 0.3);
      EXPECT_TRUE(d.box.is_valid());
    }
  }
  EXPECT_NEAR(total / 500.0, 2.0, 0.25);
}

TEST(Ensemble, SizeAndDistinctSeeds) {
  const auto members = train_ensemble({0.5, 0.5}, EnvCondition::ClearDay, 5, 42);
  ASSERT_EQ(members.size(), 5u);
  std::set<std::uint64_t> seeds;
  for (const auto& m : members) seeds.insert(m.seed);
  EXPECT_EQ(seeds.size(), 5u);
}

TEST(Ensemble, TooSmallThrows) {
  EXPECT_THROW(train_ensemble({0.5, 0.5}, EnvCondition::ClearDay, 1, 0),
               InvalidEnsembleSize);
}

TEST(Ensemble, SameSeedSameEnsemble) {
  const auto a = train_ensemble({0.3, 0.8}, EnvCondition::ClearNight, 5, 7);
  const auto b = train_ensemble({0.3, 0.8}, EnvCondition::ClearNight, 5, 7);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].peak_offset_scale, b[i].peak_offset_scale);
    EXPECT_EQ(a[i].peak_offset_brightness, b[i].peak_offset_brightness);
  }
}

TEST(Ensemble, ZeroJitterGivesZeroSpread) {
  const auto members = train_ensemble({0.5, 0.5}, EnvCondition::ClearDay, 5, 3, 0.0);
  Rng rng(4);
  int frames = 0;
  for (int i = 0; i < 200; ++i) {
    const auto u = ensemble_uncertainty(members, kTruth, EnvCondition::NightRain, rng);
    if (u.detections == 0) continue;
    ++frames;
    EXPECT_EQ(u.detections, 5);
    EXPECT_EQ(u.mean(), 0.0);
  }
  EXPECT_GT(frames, 0);
}

TEST(Ensemble, TwoPointSampleSd) {
  const std::vector<BoundingBox> boxes{{0.4, 0.5, 0.1, 0.1}, {0.6, 0.5, 0.1, 0.1}};
  const auto u = box_spread(boxes);
  EXPECT_NEAR(u.sd_cx, 0.141421, 1e-6);
  EXPECT_EQ(u.sd_cy, 0.0);
  EXPECT_EQ(u.sd_w, 0.0);
}

TEST(Ensemble, FewerThanTwoBoxesSaturates) {
  const std::vector<BoundingBox> one{{0.4, 0.5, 0.1, 0.1}};
  EXPECT_EQ(box_spread(one).mean(), 1.0);
  EXPECT_EQ(box_spread({}).mean(), 1.0);
}

TEST(Ensemble, MismatchAmplifiesOffsets) {
  EXPECT_EQ(domain_mismatch(EnvCondition::ClearDay, EnvCondition::ClearDay), 1.0);
  for (EnvCondition a : kAllEnvs)
    for (EnvCondition b : kAllEnvs) {
      EXPECT_EQ(domain_mismatch(a, b), domain_mismatch(b, a));
      if (a != b) EXPECT_GT(domain_mismatch(a, b), 1.0);
    }
}

TEST(LandscapeCsv, RowCount) {
  std::ostringstream out;
  write_landscape_csv(out, Landscape::calibrated(), kAllEnvs, 11);
  std::istringstream in(out.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++rows;
  EXPECT_EQ(rows, 1 + 3 * 121);
}
