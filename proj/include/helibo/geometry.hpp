#pragma once

#include <optional>

namespace helibo {

// Normalized image-space box in center format (the YOLO label layout).
// Boxes may hang off the frame by up to a quarter of the frame on each side.
struct BoundingBox {
  double cx = 0.5;
  double cy = 0.5;
  double w = 0.0;
  double h = 0.0;

  static constexpr double kOverflow = 0.25;

  // Throws InvalidBox when the invariants do not hold.
  static BoundingBox make(double cx, double cy, double w, double h);

  double area() const { return w * h; }
  double left() const { return cx - 0.5 * w; }
  double right() const { return cx + 0.5 * w; }
  double top() const { return cy - 0.5 * h; }
  double bottom() const { return cy + 0.5 * h; }

  bool is_valid() const;

  // Fraction of the box area that lies inside the [0,1]^2 frame.
  double frame_overlap() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

double iou(const BoundingBox& a, const BoundingBox& b);

struct WorldPose {
  double x = 0.0;  // east, m
  double y = 0.0;  // north, m
  double z = 0.0;  // altitude above the pad plane, m

  friend bool operator==(const WorldPose&, const WorldPose&) = default;
};

// Downward-looking square pinhole camera. The camera sits mount_height_m
// above the vehicle reference point, so at touchdown it still sees the pad
// from that height.
struct CameraModel {
  double fov_deg = 90.0;
  int image_px = 640;
  double mount_height_m = 2.16;
  BoundingBox center_box{0.5, 0.5, 0.5, 0.5};

  static CameraModel make(double fov_deg, int image_px, double mount_height_m,
                          double center_side);

  // Normalized focal factor: image half-width over tan(fov/2).
  double focal() const;
  // Ground area covered by the center box when the vehicle is on the pad.
  double touchdown_footprint_m2() const;
  bool is_valid() const;
};

struct Helipad {
  WorldPose center{};
  double side_m = 2.0;

  // True when the pad looks smaller than the center box at touchdown.
  bool operable_with(const CameraModel& cam) const;
};

inline constexpr double kMinCameraAltitude = 0.1;
inline constexpr double kMinFrameOverlap = 0.25;

// Projects the pad into the image of a camera carried at `pose`. Returns
// nullopt when less than a quarter of the projected box is in frame or the
// box leaves the overflow band. Throws AltitudeTooLow when the camera is
// within 0.1 m of the pad plane.
std::optional<BoundingBox> project_pad(const WorldPose& pose,
                                       const Helipad& pad,
                                       const CameraModel& cam);

// Inverse of the size relation used by project_pad: camera altitude implied
// by a pad box of the given area.
double altitude_from_area(double box_area, double pad_side_m,
                          const CameraModel& cam);

}  // namespace helibo
