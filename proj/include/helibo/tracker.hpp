#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "helibo/detector.hpp"
#include "helibo/geometry.hpp"

namespace helibo {

using TrackVector = Eigen::Matrix<double, 7, 1>;
using TrackCovariance = Eigen::Matrix<double, 7, 7>;
using MeasVector = Eigen::Matrix<double, 4, 1>;
using MeasCovariance = Eigen::Matrix<double, 4, 4>;

// Constant-velocity box filter noise. The defaults are the SORT reference
// values expressed in normalized image units.
struct KalmanNoise {
  TrackCovariance initial;
  TrackCovariance process;
  MeasCovariance measurement;

  static KalmanNoise sort_defaults(int image_px = 640);
};

// State is (u, v, s, r, du, dv, ds): center, area, aspect ratio and the
// per-frame rates of the first three.
struct TrackState {
  TrackVector mean = TrackVector::Zero();
  TrackCovariance cov = TrackCovariance::Identity();
  int id = 0;
  int hits = 0;              // consecutive frames with a matched detection
  int age_since_update = 0;  // frames since the last matched detection

  BoundingBox box() const;
};

enum class TargetRule { LargestArea, NearestCenter };

struct TrackerConfig {
  double iou_threshold = 0.3;
  int max_age = 10;
  int min_hits = 3;
  TargetRule target_rule = TargetRule::LargestArea;
  KalmanNoise noise = KalmanNoise::sort_defaults();

  bool is_valid() const {
    return iou_threshold > 0.0 && iou_threshold < 1.0 && max_age >= 1 &&
           min_hits >= 1;
  }
};

MeasVector measurement_from_box(const BoundingBox& box);

TrackState make_track(const BoundingBox& box, int id, const KalmanNoise& noise);
TrackState predict(const TrackState& track, const KalmanNoise& noise);
TrackState update(const TrackState& track, const Detection& det,
                  const KalmanNoise& noise);

// Minimum-cost assignment on a rectangular cost matrix (row-major, rows x
// cols). Returns, for each row, the assigned column or -1.
std::vector<int> solve_assignment(std::span<const double> cost, int rows,
                                  int cols);

struct Association {
  std::vector<std::pair<int, int>> matches;  // (track index, detection index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

// Maximum total-IoU matching; pairs below the threshold are split apart.
Association associate(std::span<const BoundingBox> tracks,
                      std::span<const BoundingBox> detections,
                      double iou_threshold);

struct TrackerState {
  std::vector<TrackState> tracks;
  int next_id = 1;
  long frame = 0;
};

struct TrackerStep {
  TrackerState state;
  std::vector<TrackState> confirmed;
};

TrackerStep step_tracker(const TrackerState& state,
                         std::span<const Detection> detections,
                         const TrackerConfig& cfg);

// The confirmed track the controller should follow, if any.
std::optional<TrackState> select_target(std::span<const TrackState> confirmed,
                                        TargetRule rule);

// Optional per-frame track log: frame,id,cx,cy,w,h,hits.
void write_track_log_header(std::ostream& out);
void write_track_log_rows(std::ostream& out, long frame,
                          std::span<const TrackState> tracks);

}  // namespace helibo
