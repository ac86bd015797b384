#include "helibo/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <fmt/ostream.h>

namespace helibo {

namespace {

using MeasMatrix = Eigen::Matrix<double, 4, 7>;

TrackCovariance transition() {
  TrackCovariance f = TrackCovariance::Identity();
  f(0, 4) = 1.0;
  f(1, 5) = 1.0;
  f(2, 6) = 1.0;
  return f;
}

MeasMatrix observation() {
  MeasMatrix h = MeasMatrix::Zero();
  h.leftCols<4>().setIdentity();
  return h;
}

}  // namespace

KalmanNoise KalmanNoise::sort_defaults(int image_px) {
  const double px = 1.0 / image_px;
  const double pos = px * px;      // pixel^2 -> normalized^2
  const double area = pos * pos;   // pixel^4 -> normalized^4

  KalmanNoise n;
  Eigen::Matrix<double, 7, 1> unit;
  unit << pos, pos, area, 1.0, pos, pos, area;

  Eigen::Matrix<double, 7, 1> p0;
  p0 << 10.0, 10.0, 10.0, 10.0, 1.0e4, 1.0e4, 1.0e4;
  n.initial = p0.cwiseProduct(unit).asDiagonal();

  Eigen::Matrix<double, 7, 1> q;
  q << 1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 1.0e-4;
  n.process = q.cwiseProduct(unit).asDiagonal();

  Eigen::Matrix<double, 4, 1> r;
  r << 1.0 * pos, 1.0 * pos, 10.0 * area, 10.0;
  n.measurement = r.asDiagonal();
  return n;
}

BoundingBox TrackState::box() const {
  const double s = std::max(mean(2), 1e-12);
  const double r = std::max(mean(3), 1e-6);
  const double w = std::sqrt(s * r);
  return BoundingBox{mean(0), mean(1), w, s / w};
}

MeasVector measurement_from_box(const BoundingBox& box) {
  MeasVector z;
  z << box.cx, box.cy, box.w * box.h, box.w / box.h;
  return z;
}

TrackState make_track(const BoundingBox& box, int id, const KalmanNoise& noise) {
  TrackState t;
  t.mean.setZero();
  t.mean.head<4>() = measurement_from_box(box);
  t.cov = noise.initial;
  t.id = id;
  t.hits = 1;
  t.age_since_update = 0;
  return t;
}

TrackState predict(const TrackState& track, const KalmanNoise& noise) {
  static const TrackCovariance f = transition();
  TrackState t = track;
  if (t.mean(2) + t.mean(6) <= 0.0) t.mean(6) = 0.0;
  t.mean = f * t.mean;
  t.cov = f * t.cov * f.transpose() + noise.process;
  t.cov = 0.5 * (t.cov + t.cov.transpose());
  if (t.age_since_update > 0) t.hits = 0;
  t.age_since_update += 1;
  return t;
}

TrackState update(const TrackState& track, const Detection& det,
                  const KalmanNoise& noise) {
  static const MeasMatrix h = observation();
  TrackState t = track;
  const MeasVector innovation = measurement_from_box(det.box) - h * t.mean;
  const MeasCovariance s = h * t.cov * h.transpose() + noise.measurement;
  const Eigen::Matrix<double, 7, 4> gain =
      t.cov * h.transpose() * s.llt().solve(MeasCovariance::Identity());
  t.mean += gain * innovation;
  // Joseph form keeps the covariance symmetric PSD.
  const TrackCovariance ikh = TrackCovariance::Identity() - gain * h;
  t.cov = ikh * t.cov * ikh.transpose() +
          gain * noise.measurement * gain.transpose();
  t.cov = 0.5 * (t.cov + t.cov.transpose());
  t.hits += 1;
  t.age_since_update = 0;
  return t;
}

std::vector<int> solve_assignment(std::span<const double> cost, int rows,
                                  int cols) {
  std::vector<int> row_to_col(static_cast<std::size_t>(rows), -1);
  if (rows == 0 || cols == 0) return row_to_col;

  // Shortest augmenting path with potentials on an n x m problem, n <= m.
  // Tall matrices are solved transposed.
  const bool transposed = rows > cols;
  const int n = transposed ? cols : rows;
  const int m = transposed ? rows : cols;
  const auto at = [&](int i, int j) {
    return transposed ? cost[static_cast<std::size_t>(j * cols + i)]
                      : cost[static_cast<std::size_t>(i * cols + j)];
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    const int i = p[j] - 1;
    const int jj = j - 1;
    if (transposed) {
      row_to_col[static_cast<std::size_t>(jj)] = i;
    } else {
      row_to_col[static_cast<std::size_t>(i)] = jj;
    }
  }
  return row_to_col;
}

Association associate(std::span<const BoundingBox> tracks,
                      std::span<const BoundingBox> detections,
                      double iou_threshold) {
  const int nt = static_cast<int>(tracks.size());
  const int nd = static_cast<int>(detections.size());
  Association out;

  std::vector<double> overlap(static_cast<std::size_t>(nt * nd));
  std::vector<double> cost(overlap.size());
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nd; ++j) {
      const auto k = static_cast<std::size_t>(i * nd + j);
      overlap[k] = iou(tracks[i], detections[j]);
      cost[k] = 1.0 - overlap[k];
    }
  }
  const std::vector<int> assignment = solve_assignment(cost, nt, nd);

  std::vector<char> det_used(static_cast<std::size_t>(nd), 0);
  for (int i = 0; i < nt; ++i) {
    const int j = assignment[static_cast<std::size_t>(i)];
    if (j >= 0 && overlap[static_cast<std::size_t>(i * nd + j)] >= iou_threshold) {
      out.matches.emplace_back(i, j);
      det_used[static_cast<std::size_t>(j)] = 1;
    } else {
      out.unmatched_tracks.push_back(i);
    }
  }
  for (int j = 0; j < nd; ++j) {
    if (!det_used[static_cast<std::size_t>(j)]) out.unmatched_detections.push_back(j);
  }
  return out;
}

TrackerStep step_tracker(const TrackerState& state,
                         std::span<const Detection> detections,
                         const TrackerConfig& cfg) {
  TrackerStep out;
  TrackerState& next = out.state;
  next.next_id = state.next_id;
  next.frame = state.frame + 1;
  next.tracks.reserve(state.tracks.size() + detections.size());
  for (const TrackState& t : state.tracks) {
    next.tracks.push_back(predict(t, cfg.noise));
  }

  std::vector<BoundingBox> track_boxes;
  track_boxes.reserve(next.tracks.size());
  for (const TrackState& t : next.tracks) track_boxes.push_back(t.box());
  std::vector<BoundingBox> det_boxes;
  det_boxes.reserve(detections.size());
  for (const Detection& d : detections) det_boxes.push_back(d.box);

  const Association assoc = associate(track_boxes, det_boxes, cfg.iou_threshold);
  for (const auto& [ti, di] : assoc.matches) {
    next.tracks[static_cast<std::size_t>(ti)] =
        update(next.tracks[static_cast<std::size_t>(ti)],
               detections[static_cast<std::size_t>(di)], cfg.noise);
  }
  for (int di : assoc.unmatched_detections) {
    next.tracks.push_back(make_track(detections[static_cast<std::size_t>(di)].box,
                                     next.next_id++, cfg.noise));
  }
  std::erase_if(next.tracks, [&](const TrackState& t) {
    return t.age_since_update > cfg.max_age;
  });
  for (const TrackState& t : next.tracks) {
    if (t.age_since_update == 0 && t.hits >= cfg.min_hits) {
      out.confirmed.push_back(t);
    }
  }
  return out;
}

std::optional<TrackState> select_target(std::span<const TrackState> confirmed,
                                        TargetRule rule) {
  if (confirmed.empty()) return std::nullopt;
  const auto score = [rule](const TrackState& t) {
    if (rule == TargetRule::LargestArea) return t.mean(2);
    const double du = t.mean(0) - 0.5;
    const double dv = t.mean(1) - 0.5;
    return -(du * du + dv * dv);
  };
  // Ties resolve to the lowest id, which is the first in track order.
  const TrackState* best = &confirmed.front();
  for (const TrackState& t : confirmed) {
    if (score(t) > score(*best)) best = &t;
  }
  return *best;
}

void write_track_log_header(std::ostream& out) {
  out << "# helibo tracks v1\n";
  out << "frame,id,cx,cy,w,h,hits\n";
}

void write_track_log_rows(std::ostream& out, long frame,
                          std::span<const TrackState> tracks) {
  for (const TrackState& t : tracks) {
    const BoundingBox b = t.box();
    fmt::print(out, "{},{},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", frame, t.id, b.cx,
               b.cy, b.w, b.h, t.hits);
  }
}

}  // namespace helibo
