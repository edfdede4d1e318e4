#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aerosynth/image.hpp"
#include "aerosynth/scene_model.hpp"

namespace aerosynth {

/// Integer pixel box, inclusive min and exclusive max.
struct PixelBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const { return x_max - x_min; }
  int height() const { return y_max - y_min; }
  int max_side() const { return width() > height() ? width() : height(); }
  std::int64_t area() const { return static_cast<std::int64_t>(width()) * height(); }
  bool valid_for(int image_width, int image_height) const {
    return 0 <= x_min && x_min < x_max && x_max <= image_width && 0 <= y_min && y_min < y_max &&
           y_max <= image_height;
  }
  bool operator==(const PixelBox&) const = default;
};

/// One label line: class and center/size normalized by the image dimensions.
struct AnnotationRecord {
  ClassId cls = ClassId::drone;
  double x_c = 0.0;
  double y_c = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool operator==(const AnnotationRecord&) const = default;
};

struct PixelPos {
  int x = 0;
  int y = 0;
  bool operator==(const PixelPos&) const = default;
};

struct InstanceMask {
  std::uint32_t instance_id = 0;
  ClassId cls = ClassId::drone;
  std::vector<PixelPos> pixels;  ///< raster order
};

/// 8-connected components of equal nonzero id. A single instance split by an
/// occluder yields several masks. Masks come out in raster order of their first
/// pixel. Throws unknown_id for ids missing from `classes`.
std::vector<InstanceMask> connected_components(const Image<std::uint32_t>& segmap,
                                               const InstanceClassTable& classes);

/// Throws empty_mask for a mask without pixels.
PixelBox tight_box(const InstanceMask& mask);

/// Throws box_out_of_bounds unless the box is valid for a width x height image.
AnnotationRecord to_yolo(const PixelBox& box, ClassId cls, int width, int height);

/// Inverse of to_yolo, rounding to the nearest pixel edges.
PixelBox from_yolo(const AnnotationRecord& record, int width, int height);

inline constexpr int kMinBoxSide = 5;
inline constexpr double kMaxBoxAreaFraction = 0.20;

struct OversizeWarning {
  std::uint32_t instance_id = 0;
  PixelBox box;
  double area_fraction = 0.0;
};

/// Drops masks whose tight box has a longer side below kMinBoxSide. Masks above
/// kMaxBoxAreaFraction of the image are kept and reported in `oversize`.
std::vector<InstanceMask> filter_instances(std::vector<InstanceMask> masks, int width, int height,
                                           std::vector<OversizeWarning>* oversize = nullptr);

/// `<class> <x_c> <y_c> <w> <h>` per line, 6 decimals, largest box first.
std::string serialize_labels(std::vector<AnnotationRecord> records);

/// Strict inverse of serialize_labels; throws layout_invalid naming the line.
std::vector<AnnotationRecord> parse_labels(std::string_view text);

struct FrameAnnotation {
  std::uint32_t instance_id = 0;
  PixelBox box;
  AnnotationRecord record;
};

struct AnnotationResult {
  std::vector<FrameAnnotation> annotations;
  std::vector<OversizeWarning> oversize;
  std::size_t fragments = 0;  ///< components before the size filter
};

/// Components, filter, tight boxes and records for one segmentation map.
AnnotationResult annotate_segmap(const Image<std::uint32_t>& segmap,
                                 const InstanceClassTable& classes);

std::vector<AnnotationRecord> records_of(const AnnotationResult& result);

}  // namespace aerosynth
