#include "helibo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "helibo/errors.hpp"

namespace helibo {

BoundingBox BoundingBox::make(double cx, double cy, double w, double h) {
  BoundingBox b{cx, cy, w, h};
  if (!b.is_valid()) {
    throw InvalidBox(
        fmt::format("invalid box cx={} cy={} w={} h={}", cx, cy, w, h));
  }
  return b;
}

bool BoundingBox::is_valid() const {
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) ||
      !std::isfinite(h)) {
    return false;
  }
  if (w <= 0.0 || h <= 0.0) return false;
  constexpr double lo = -kOverflow;
  constexpr double hi = 1.0 + kOverflow;
  return left() >= lo && right() <= hi && top() >= lo && bottom() <= hi;
}

double BoundingBox::frame_overlap() const {
  const double iw = std::max(0.0, std::min(right(), 1.0) - std::max(left(), 0.0));
  const double ih = std::max(0.0, std::min(bottom(), 1.0) - std::max(top(), 0.0));
  return iw * ih / area();
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::max(0.0, std::min(a.right(), b.right()) -
                                      std::max(a.left(), b.left()));
  const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) -
                                      std::max(a.top(), b.top()));
  const double inter = iw * ih;
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

CameraModel CameraModel::make(double fov_deg, int image_px,
                              double mount_height_m, double center_side) {
  CameraModel cam;
  cam.fov_deg = fov_deg;
  cam.image_px = image_px;
  cam.mount_height_m = mount_height_m;
  cam.center_box = BoundingBox{0.5, 0.5, center_side, center_side};
  if (!cam.is_valid()) {
    throw InvalidBox(fmt::format(
        "invalid camera fov={} px={} mount={} center_side={}", fov_deg,
        image_px, mount_height_m, center_side));
  }
  return cam;
}

double CameraModel::focal() const {
  const double half = 0.5 * fov_deg * std::numbers::pi / 180.0;
  return 0.5 / std::tan(half);
}

double CameraModel::touchdown_footprint_m2() const {
  const double side = center_box.w * mount_height_m / focal();
  return side * side;
}

bool CameraModel::is_valid() const {
  return fov_deg > 0.0 && fov_deg < 180.0 && image_px > 0 &&
         mount_height_m >= 0.0 && center_box.is_valid() &&
         center_box.cx == 0.5 && center_box.cy == 0.5;
}

bool Helipad::operable_with(const CameraModel& cam) const {
  return side_m > 0.0 && side_m * side_m < cam.touchdown_footprint_m2();
}

std::optional<BoundingBox> project_pad(const WorldPose& pose,
                                       const Helipad& pad,
                                       const CameraModel& cam) {
  const double alt = pose.z + cam.mount_height_m - pad.center.z;
  if (!(alt > kMinCameraAltitude)) {
    throw AltitudeTooLow(fmt::format("camera altitude {} m", alt));
  }
  const double f = cam.focal();
  // Image x follows world east; image y grows downward, i.e. toward south.
  BoundingBox box;
  box.cx = 0.5 + f * (pad.center.x - pose.x) / alt;
  box.cy = 0.5 - f * (pad.center.y - pose.y) / alt;
  box.w = f * pad.side_m / alt;
  box.h = box.w;
  if (!box.is_valid() || box.frame_overlap() < kMinFrameOverlap) {
    return std::nullopt;
  }
  return box;
}

double altitude_from_area(double box_area, double pad_side_m,
                          const CameraModel& cam) {
  return cam.focal() * pad_side_m / std::sqrt(box_area);
}

}  // namespace helibo
