#include "helibo/labels.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "helibo/errors.hpp"
#include "helibo/rng.hpp"

namespace helibo {

LabelRecord convert_annotation(const CornerAnnotation& a) {
  if (!(a.x_min < a.x_max) || !(a.y_min < a.y_max)) {
    throw DegenerateBox(fmt::format("{}: corners ({}, {})-({}, {}) are degenerate",
                                    a.image, a.x_min, a.y_min, a.x_max, a.y_max));
  }
  if (!(a.img_w > 0.0) || !(a.img_h > 0.0) || a.x_min < 0.0 || a.y_min < 0.0 ||
      a.x_max > a.img_w || a.y_max > a.img_h) {
    throw OutOfBounds(fmt::format("{}: corners ({}, {})-({}, {}) exceed {}x{}",
                                  a.image, a.x_min, a.y_min, a.x_max, a.y_max,
                                  a.img_w, a.img_h));
  }
  LabelRecord r;
  r.class_id = a.class_id;
  r.x_center = (a.x_min + a.x_max) / (2.0 * a.img_w);
  r.y_center = (a.y_min + a.y_max) / (2.0 * a.img_h);
  r.width = (a.x_max - a.x_min) / a.img_w;
  r.height = (a.y_max - a.y_min) / a.img_h;
  return r;
}

CornerAnnotation denormalize(const LabelRecord& r, double img_w, double img_h) {
  CornerAnnotation a;
  a.class_id = r.class_id;
  a.img_w = img_w;
  a.img_h = img_h;
  a.x_min = (r.x_center - 0.5 * r.width) * img_w;
  a.x_max = (r.x_center + 0.5 * r.width) * img_w;
  a.y_min = (r.y_center - 0.5 * r.height) * img_h;
  a.y_max = (r.y_center + 0.5 * r.height) * img_h;
  return a;
}

std::string format_label(const LabelRecord& r) {
  return fmt::format("{} {:.6f} {:.6f} {:.6f} {:.6f}", r.class_id, r.x_center,
                     r.y_center, r.width, r.height);
}

std::vector<CornerAnnotation> read_annotations_csv(std::istream& in) {
  std::vector<CornerAnnotation> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) {
      throw ConfigError(fmt::format("annotations line {}: expected 8 columns, got {}",
                                    line_no, cells.size()));
    }
    if (cells[0] == "image") continue;  // header
    CornerAnnotation a;
    a.image = cells[0];
    try {
      a.class_id = std::stoi(cells[1]);
      a.x_min = std::stod(cells[2]);
      a.y_min = std::stod(cells[3]);
      a.x_max = std::stod(cells[4]);
      a.y_max = std::stod(cells[5]);
      a.img_w = std::stod(cells[6]);
      a.img_h = std::stod(cells[7]);
    } catch (const std::logic_error&) {
      throw ConfigError(fmt::format("annotations line {}: bad number", line_no));
    }
    rows.push_back(std::move(a));
  }
  return rows;
}

ConvertSummary convert_directory(const std::filesystem::path& input,
                                 const std::filesystem::path& output,
                                 double train_fraction, std::uint64_t seed) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(input)) {
    throw ConfigError(fmt::format("input: '{}' is not a directory", input.string()));
  }
  std::vector<fs::path> sources;
  for (const auto& entry : fs::directory_iterator(input)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      sources.push_back(entry.path());
    }
  }
  std::sort(sources.begin(), sources.end());

  // Ordered by image name.
  std::map<std::string, std::vector<LabelRecord>> per_image;
  for (const fs::path& src : sources) {
    std::ifstream in(src);
    if (!in) throw Error(fmt::format("cannot read '{}'", src.string()));
    for (const CornerAnnotation& a : read_annotations_csv(in)) {
      per_image[a.image].push_back(convert_annotation(a));
    }
  }

  fs::create_directories(output);
  ConvertSummary summary;
  std::vector<std::string> names;
  for (const auto& [image, labels] : per_image) {
    const fs::path target = output / (fs::path(image).stem().string() + ".txt");
    std::ofstream out(target, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", target.string()));
    for (const LabelRecord& r : labels) out << format_label(r) << '\n';
    ++summary.images;
    summary.objects += static_cast<int>(labels.size());
    names.push_back(image);
  }

  if (train_fraction > 0.0 && train_fraction < 1.0) {
    Rng rng = make_rng(seed, "label-split");
    std::shuffle(names.begin(), names.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(names.size())));
    summary.train.assign(names.begin(), names.begin() + static_cast<long>(n_train));
    summary.val.assign(names.begin() + static_cast<long>(n_train), names.end());
    std::sort(summary.train.begin(), summary.train.end());
    std::sort(summary.val.begin(), summary.val.end());
    for (const auto& [file, list] :
         {std::pair{"train.txt", &summary.train}, std::pair{"val.txt", &summary.val}}) {
      std::ofstream out(output / file, std::ios::binary);
      for (const std::string& name : *list) out << name << '\n';
    }
  }
  return summary;
}

}  // namespace helibo
