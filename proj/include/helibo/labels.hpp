#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace helibo {

// Pixel-space min/max corner annotation as exported by labeling tools.
struct CornerAnnotation {
  std::string image;
  int class_id = 0;
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
  double img_w = 0.0;
  double img_h = 0.0;
};

// <class_id> <x_center> <y_center> <width> <height>, normalized.
struct LabelRecord {
  int class_id = 0;
  double x_center = 0.0;
  double y_center = 0.0;
  double width = 0.0;
  double height = 0.0;
};

// Throws DegenerateBox or OutOfBounds.
LabelRecord convert_annotation(const CornerAnnotation& a);
CornerAnnotation denormalize(const LabelRecord& r, double img_w, double img_h);

// Six decimals, single spaces, no trailing newline.
std::string format_label(const LabelRecord& r);

// Reads rows image,class_id,x_min,y_min,x_max,y_max,img_w,img_h. A header
// row is optional.
std::vector<CornerAnnotation> read_annotations_csv(std::istream& in);

struct ConvertSummary {
  int images = 0;
  int objects = 0;
  std::vector<std::string> train;
  std::vector<std::string> val;
};

// Converts every *.csv under `input` into one <image-stem>.txt per image in
// `output`. With train_fraction in (0, 1), also writes train.txt and val.txt
// from a seeded shuffle of the image names.
ConvertSummary convert_directory(const std::filesystem::path& input,
                                 const std::filesystem::path& output,
                                 double train_fraction = 0.0,
                                 std::uint64_t seed = 0);

}  // namespace helibo
