#include "aerosynth/annotation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "aerosynth/error.hpp"

namespace aerosynth {
namespace {

class DisjointSet {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent_[std::max(a, b)] = std::min(a, b);
    }
  }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

std::vector<InstanceMask> connected_components(const Image<std::uint32_t>& segmap,
                                               const InstanceClassTable& classes) {
  const int width = segmap.width(), height = segmap.height();
  constexpr std::uint32_t kNone = 0xffffffffu;
  std::vector<std::uint32_t> labels(segmap.size(), kNone);
  DisjointSet sets;

  // First pass: provisional labels from the already-visited 8-neighbours
  // (W, NW, N, NE).
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::uint32_t id = segmap.at(x, y);
      if (id == 0) {
        continue;
      }
      std::uint32_t label = kNone;
      constexpr int kOffsets[4][2] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
      for (const auto& off : kOffsets) {
        const int nx = x + off[0], ny = y + off[1];
        if (!segmap.contains(nx, ny) || segmap.at(nx, ny) != id) {
          continue;
        }
        const std::uint32_t other = labels[static_cast<std::size_t>(ny) * width + nx];
        if (label == kNone) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      }
      labels[static_cast<std::size_t>(y) * width + x] = label == kNone ? sets.make() : label;
    }
  }

  // Second pass: resolve roots and gather pixels in raster order.
  std::vector<std::uint32_t> mask_of_root;
  std::vector<InstanceMask> masks;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::uint32_t label = labels[static_cast<std::size_t>(y) * width + x];
      if (label == kNone) {
        continue;
      }
      const std::uint32_t root = sets.find(label);
      if (root >= mask_of_root.size()) {
        mask_of_root.resize(root + 1, kNone);
      }
      if (mask_of_root[root] == kNone) {
        const std::uint32_t id = segmap.at(x, y);
        const auto it = classes.find(id);
        if (it == classes.end()) {
          throw Error(ErrorCode::unknown_id,
                      "segmentation id " + std::to_string(id) + " is not an annotatable instance");
        }
        mask_of_root[root] = static_cast<std::uint32_t>(masks.size());
        masks.push_back({id, it->second, {}});
      }
      masks[mask_of_root[root]].pixels.push_back({x, y});
    }
  }
  return masks;
}

PixelBox tight_box(const InstanceMask& mask) {
  if (mask.pixels.empty()) {
    throw Error(ErrorCode::empty_mask, "instance " + std::to_string(mask.instance_id) +
                                           " has no pixels");
  }
  PixelBox box{mask.pixels[0].x, mask.pixels[0].y, mask.pixels[0].x + 1, mask.pixels[0].y + 1};
  for (const auto& p : mask.pixels) {
    box.x_min = std::min(box.x_min, p.x);
    box.y_min = std::min(box.y_min, p.y);
    box.x_max = std::max(box.x_max, p.x + 1);
    box.y_max = std::max(box.y_max, p.y + 1);
  }
  return box;
}

AnnotationRecord to_yolo(const PixelBox& box, ClassId cls, int width, int height) {
  if (width <= 0 || height <= 0 || !box.valid_for(width, height)) {
    throw Error(ErrorCode::box_out_of_bounds,
                "box (" + std::to_string(box.x_min) + "," + std::to_string(box.y_min) + "," +
                    std::to_string(box.x_max) + "," + std::to_string(box.y_max) +
                    ") does not fit a " + std::to_string(width) + "x" + std::to_string(height) +
                    " image");
  }
  // Integer numerators and denominators: each field is one correctly rounded division.
  AnnotationRecord r;
  r.cls = cls;
  r.x_c = static_cast<double>(box.x_min + box.x_max) / (2.0 * width);
  r.y_c = static_cast<double>(box.y_min + box.y_max) / (2.0 * height);
  r.w = static_cast<double>(box.x_max - box.x_min) / width;
  r.h = static_cast<double>(box.y_max - box.y_min) / height;
  return r;
}

PixelBox from_yolo(const AnnotationRecord& r, int width, int height) {
  const double cx = r.x_c * width, cy = r.y_c * height;
  const double hw = r.w * width / 2.0, hh = r.h * height / 2.0;
  return {static_cast<int>(std::lround(cx - hw)), static_cast<int>(std::lround(cy - hh)),
          static_cast<int>(std::lround(cx + hw)), static_cast<int>(std::lround(cy + hh))};
}

std::vector<InstanceMask> filter_instances(std::vector<InstanceMask> masks, int width, int height,
                                           std::vector<OversizeWarning>* oversize) {
  const double image_area = static_cast<double>(width) * height;
  std::vector<InstanceMask> kept;
  kept.reserve(masks.size());
  for (auto& mask : masks) {
    const PixelBox box = tight_box(mask);
    if (box.max_side() < kMinBoxSide) {
      continue;
    }
    const double fraction = static_cast<double>(box.area()) / image_area;
    if (fraction > kMaxBoxAreaFraction && oversize) {
      oversize->push_back({mask.instance_id, box, fraction});
    }
    kept.push_back(std::move(mask));
  }
  return kept;
}

std::string serialize_labels(std::vector<AnnotationRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const AnnotationRecord& a, const AnnotationRecord& b) {
                     const double aa = a.w * a.h, ba = b.w * b.h;
                     if (aa != ba) return aa > ba;
                     if (a.cls != b.cls) return a.cls < b.cls;
                     if (a.x_c != b.x_c) return a.x_c < b.x_c;
                     return a.y_c < b.y_c;
                   });
  std::string out;
  char line[96];
  for (const auto& r : records) {
    const int n = std::snprintf(line, sizeof line, "%d %.6f %.6f %.6f %.6f\n",
                                static_cast<int>(r.cls), r.x_c, r.y_c, r.w, r.h);
    out.append(line, static_cast<std::size_t>(n));
  }
  return out;
}

namespace {

bool parse_fixed6(std::string_view token, double& value) {
  // d.dddddd
  if (token.size() != 8 || token[1] != '.') {
    return false;
  }
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (i != 1 && (token[i] < '0' || token[i] > '9')) {
      return false;
    }
  }
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc{} && ptr == token.data() + token.size() && value <= 1.0;
}

}  // namespace

std::vector<AnnotationRecord> parse_labels(std::string_view text) {
  std::vector<AnnotationRecord> records;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    if (nl == std::string_view::npos) {
      throw Error(ErrorCode::layout_invalid,
                  "line " + std::to_string(line_no) + " is not newline-terminated");
    }
    const std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl + 1);
    auto fail = [&](const char* why) {
      return Error(ErrorCode::layout_invalid,
                   "line " + std::to_string(line_no) + ": " + why + " ('" + std::string(line) + "')");
    };

    std::vector<std::string_view> tokens;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t sp = line.find(' ', start);
      const std::size_t end = sp == std::string_view::npos ? line.size() : sp;
      tokens.push_back(line.substr(start, end - start));
      if (sp == std::string_view::npos) break;
      start = sp + 1;
    }
    if (tokens.size() != 5) {
      throw fail("expected 5 space-separated fields");
    }
    AnnotationRecord r;
    if (tokens[0] == "0") {
      r.cls = ClassId::drone;
    } else if (tokens[0] == "1") {
      r.cls = ClassId::bird;
    } else {
      throw fail("class must be 0 or 1");
    }
    double* fields[4] = {&r.x_c, &r.y_c, &r.w, &r.h};
    for (int i = 0; i < 4; ++i) {
      if (!parse_fixed6(tokens[i + 1], *fields[i])) {
        throw fail("coordinates must be fixed-point with 6 decimals in [0, 1]");
      }
    }
    records.push_back(r);
  }
  return records;
}

AnnotationResult annotate_segmap(const Image<std::uint32_t>& segmap,
                                 const InstanceClassTable& classes) {
  AnnotationResult result;
  auto masks = connected_components(segmap, classes);
  result.fragments = masks.size();
  const auto kept = filter_instances(std::move(masks), segmap.width(), segmap.height(),
                                     &result.oversize);
  for (const auto& mask : kept) {
    FrameAnnotation a;
    a.instance_id = mask.instance_id;
    a.box = tight_box(mask);
    a.record = to_yolo(a.box, mask.cls, segmap.width(), segmap.height());
    result.annotations.push_back(a);
  }
  return result;
}

std::vector<AnnotationRecord> records_of(const AnnotationResult& result) {
  std::vector<AnnotationRecord> out;
  out.reserve(result.annotations.size());
  for (const auto& a : result.annotations) {
    out.push_back(a.record);
  }
  return out;
}

}  // namespace aerosynth
