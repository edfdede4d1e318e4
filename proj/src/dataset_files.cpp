#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>
#include <cmath>

#include "aerosynth/apportion.hpp"
#include "aerosynth/dataset_builder.hpp"
#include "aerosynth/error.hpp"
#include "aerosynth/image_io.hpp"
#include "aerosynth/rng.hpp"

namespace aerosynth {

namespace fs = std::filesystem;

namespace {

std::optional<int> parse_digits(std::string_view s, std::size_t width) {
  if (s.size() != width) return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> sorted_files(const fs::path& dir, std::string_view extension) {
  std::vector<std::string> names;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == extension) {
      names.push_back(e.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::optional<ContentBucket> bucket_of(Subset subset, std::span<const AnnotationRecord> records) {
  bool drone = false;
  bool bird = false;
  for (const auto& r : records) (r.cls == ClassId::drone ? drone : bird) = true;
  if (subset == Subset::vfx && drone) return ContentBucket::vfx_drone;
  if (drone && bird) return ContentBucket::both;
  if (drone) return ContentBucket::drone_only;
  if (bird) return ContentBucket::bird_only;
  return std::nullopt;
}

std::vector<PixelBox> boxes_of(const DatasetEntry& e) {
  std::vector<PixelBox> boxes;
  for (const auto& r : e.records) boxes.push_back(from_yolo(r, e.width, e.height));
  return boxes;
}

DatasetSummary summarize(std::span<const DatasetEntry> entries) {
  DatasetSummary summary;
  for (const auto& e : entries) {
    if (!e.bucket) {
      ++summary.images;
      continue;
    }
    summary.add_image({e.subset, *e.bucket, e.scene, e.condition}, boxes_of(e), e.records);
  }
  return summary;
}

std::vector<std::string> read_listing(const fs::path& path) {
  std::vector<std::string> lines;
  std::istringstream in(read_text(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void write_listing(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
}

std::string key_name(const CompositionKey& k) {
  return std::string(to_string(k.subset)) + "/" + std::string(to_string(k.bucket)) + "/" +
         std::string(to_string(k.scene)) + "/" + std::string(to_string(k.condition));
}

}  // namespace

std::string format_basename(const ParsedName& n) {
  char condition[16];
  switch (n.condition) {
    case WeatherCondition::clear:
      std::snprintf(condition, sizeof condition, "clear00");
      break;
    case WeatherCondition::fog:
      std::snprintf(condition, sizeof condition, "fog%02d", n.fog_percent);
      break;
    case WeatherCondition::snow:
      std::snprintf(condition, sizeof condition, "snow%02d", n.snow_percent);
      break;
    case WeatherCondition::other:
      std::snprintf(condition, sizeof condition, "otherf%02ds%02d", n.fog_percent, n.snow_percent);
      break;
  }
  char frame[24];
  std::snprintf(frame, sizeof frame, "%06zu", n.frame_index);
  return std::string(to_string(n.scene)) + "_" + std::string(to_string(n.subset)) + "_" +
         condition + "_" + frame + "_cam" + std::to_string(n.camera);
}

std::optional<ParsedName> parse_basename(std::string_view name) {
  // Scene names contain underscores, so peel fields off the end.
  auto pop = [&name]() -> std::optional<std::string_view> {
    const auto pos = name.rfind('_');
    if (pos == std::string_view::npos) return std::nullopt;
    std::string_view field = name.substr(pos + 1);
    name = name.substr(0, pos);
    return field;
  };
  const auto cam = pop();
  const auto frame = pop();
  const auto cond = pop();
  const auto subset_token = pop();
  if (!cam || !frame || !cond || !subset_token) return std::nullopt;

  ParsedName out{};
  const auto scene = parse_profile(name);
  const auto subset = parse_subset(*subset_token);
  if (!scene || !subset) return std::nullopt;
  out.scene = *scene;
  out.subset = *subset;

  if (cam->size() < 4 || cam->substr(0, 3) != "cam") return std::nullopt;
  const auto cam_digits = cam->substr(3);
  const auto camera = parse_digits(cam_digits, cam_digits.size());
  if (!camera || cam_digits.size() > 3) return std::nullopt;
  out.camera = *camera;

  if (frame->size() < 6) return std::nullopt;
  std::size_t index = 0;
  const auto [ptr, ec] = std::from_chars(frame->data(), frame->data() + frame->size(), index);
  if (ec != std::errc() || ptr != frame->data() + frame->size()) return std::nullopt;
  out.frame_index = index;

  const std::string_view c = *cond;
  if (c == "clear00") {
    out.condition = WeatherCondition::clear;
  } else if (c.size() == 5 && c.substr(0, 3) == "fog") {
    const auto v = parse_digits(c.substr(3), 2);
    if (!v) return std::nullopt;
    out.condition = WeatherCondition::fog;
    out.fog_percent = *v;
  } else if (c.size() == 6 && c.substr(0, 4) == "snow") {
    const auto v = parse_digits(c.substr(4), 2);
    if (!v) return std::nullopt;
    out.condition = WeatherCondition::snow;
    out.snow_percent = *v;
  } else if (c.size() == 11 && c.substr(0, 6) == "otherf" && c[8] == 's') {
    const auto f = parse_digits(c.substr(6, 2), 2);
    const auto s = parse_digits(c.substr(9, 2), 2);
    if (!f || !s) return std::nullopt;
    out.condition = WeatherCondition::other;
    out.fog_percent = *f;
    out.snow_percent = *s;
  } else {
    return std::nullopt;
  }
  return out;
}

void DatasetSummary::add_image(const CompositionKey& key, std::span<const PixelBox> boxes,
                               std::span<const AnnotationRecord> records) {
  ++images;
  ++counts[key];
  for (const auto& r : records) ++class_instances[static_cast<std::size_t>(r.cls)];
  for (const auto& b : boxes) {
    const int side = b.max_side();
    const bool first = std::all_of(box_histogram.begin(), box_histogram.end(),
                                   [](std::int64_t c) { return c == 0; });
    std::size_t bin = 0;
    while (bin + 1 < kBoxHistogramEdges.size() && side >= kBoxHistogramEdges[bin + 1]) ++bin;
    ++box_histogram[bin];
    if (first || side < min_box_side) min_box_side = side;
    max_box_side = std::max(max_box_side, side);
  }
}

std::int64_t DatasetSummary::subset_total(Subset subset) const {
  std::int64_t n = 0;
  for (const auto& [k, c] : counts) n += k.subset == subset ? c : 0;
  return n;
}

std::int64_t DatasetSummary::bucket_count(Subset subset, ContentBucket bucket) const {
  std::int64_t n = 0;
  for (const auto& [k, c] : counts) n += k.subset == subset && k.bucket == bucket ? c : 0;
  return n;
}

std::int64_t DatasetSummary::scene_count(Subset subset, ProfileId scene) const {
  std::int64_t n = 0;
  for (const auto& [k, c] : counts) n += k.subset == subset && k.scene == scene ? c : 0;
  return n;
}

std::int64_t DatasetSummary::condition_count(WeatherCondition condition,
                                             std::optional<ContentBucket> bucket) const {
  std::int64_t n = 0;
  for (const auto& [k, c] : counts) {
    if (k.condition == condition && (!bucket || k.bucket == *bucket)) n += c;
  }
  return n;
}

bool DatasetSummary::same_content(const DatasetSummary& o) const {
  return counts == o.counts && class_instances == o.class_instances &&
         box_histogram == o.box_histogram && min_box_side == o.min_box_side &&
         max_box_side == o.max_box_side && images == o.images &&
         train_images == o.train_images && val_images == o.val_images;
}

Json to_json(const DatasetSummary& s) {
  Json composition = Json::array();
  for (const auto& [k, c] : s.counts) {
    composition.push_back({{"subset", std::string(to_string(k.subset))},
                           {"bucket", std::string(to_string(k.bucket))},
                           {"scene", std::string(to_string(k.scene))},
                           {"condition", std::string(to_string(k.condition))},
                           {"count", c}});
  }
  Json histogram = Json::array();
  for (std::size_t i = 0; i < kBoxHistogramEdges.size(); ++i) {
    Json bin = {{"from", kBoxHistogramEdges[i]}};
    bin["to"] = i + 1 < kBoxHistogramEdges.size() ? Json(kBoxHistogramEdges[i + 1]) : Json(nullptr);
    bin["count"] = s.box_histogram[i];
    histogram.push_back(std::move(bin));
  }
  return {
      {"images", s.images},
      {"train_images", s.train_images},
      {"val_images", s.val_images},
      {"class_instances", {{"drone", s.class_instances[0]}, {"bird", s.class_instances[1]}}},
      {"min_box_side", s.min_box_side},
      {"max_box_side", s.max_box_side},
      {"box_max_side_histogram", std::move(histogram)},
      {"composition", std::move(composition)},
  };
}

DatasetSummary summary_from_json(const Json& j) {
  try {
    DatasetSummary s;
    s.images = j.at("images").get<std::int64_t>();
    s.train_images = j.at("train_images").get<std::int64_t>();
    s.val_images = j.at("val_images").get<std::int64_t>();
    s.class_instances[0] = j.at("class_instances").at("drone").get<std::int64_t>();
    s.class_instances[1] = j.at("class_instances").at("bird").get<std::int64_t>();
    s.min_box_side = j.at("min_box_side").get<int>();
    s.max_box_side = j.at("max_box_side").get<int>();
    const Json& hist = j.at("box_max_side_histogram");
    if (hist.size() != s.box_histogram.size()) throw Error(ErrorCode::layout_invalid, "histogram size");
    for (std::size_t i = 0; i < hist.size(); ++i) {
      s.box_histogram[i] = hist[i].at("count").get<std::int64_t>();
    }
    for (const Json& c : j.at("composition")) {
      const auto subset = parse_subset(c.at("subset").get<std::string>());
      const auto bucket = parse_bucket(c.at("bucket").get<std::string>());
      const auto scene = parse_profile(c.at("scene").get<std::string>());
      const auto condition = parse_condition(c.at("condition").get<std::string>());
      if (!subset || !bucket || !scene || !condition) {
        throw Error(ErrorCode::layout_invalid, "unknown composition key " + c.dump());
      }
      s.counts[{*subset, *bucket, *scene, *condition}] = c.at("count").get<std::int64_t>();
    }
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::layout_invalid, std::string("summary: ") + e.what());
  }
}

std::vector<DatasetEntry> scan_dataset(const fs::path& root) {
  std::error_code ec;
  for (const char* dir : {"images", "labels"}) {
    if (!fs::is_directory(root / dir, ec)) {
      throw Error(ErrorCode::layout_invalid, "missing directory " + (root / dir).string());
    }
  }
  std::vector<DatasetEntry> entries;
  for (Subset subset : kAllSubsets) {
    const std::string token(to_string(subset));
    const auto images = sorted_files(root / "images" / token, ".png");
    std::set<std::string> stems;
    for (const auto& file : images) {
      DatasetEntry e;
      e.basename = fs::path(file).stem().string();
      e.image = "images/" + token + "/" + file;
      e.label = "labels/" + token + "/" + e.basename + ".txt";
      const auto name = parse_basename(e.basename);
      if (!name || name->subset != subset) {
        throw Error(ErrorCode::layout_invalid, e.image + ": unrecognized file name");
      }
      e.subset = subset;
      e.scene = name->scene;
      e.condition = name->condition;
      if (!fs::is_regular_file(root / e.label, ec)) {
        throw Error(ErrorCode::layout_invalid, e.image + ": missing label file " + e.label);
      }
      try {
        e.records = parse_labels(read_text(root / e.label));
      } catch (const Error& err) {
        throw Error(ErrorCode::layout_invalid, e.label + ": " + err.what());
      }
      std::tie(e.width, e.height) = read_png_size(root / e.image);
      e.bucket = bucket_of(subset, e.records);
      stems.insert(e.basename);
      entries.push_back(std::move(e));
    }
    for (const auto& file : sorted_files(root / "labels" / token, ".txt")) {
      if (!stems.count(fs::path(file).stem().string())) {
        throw Error(ErrorCode::layout_invalid,
                    "labels/" + token + "/" + file + ": label file without an image");
      }
    }
  }
  return entries;
}

DatasetSummary compute_stats(const fs::path& root) {
  const auto entries = scan_dataset(root);
  DatasetSummary summary = summarize(entries);
  std::error_code ec;
  if (fs::is_regular_file(root / "splits" / "train.txt", ec)) {
    summary.train_images = static_cast<std::int64_t>(read_listing(root / "splits" / "train.txt").size());
  }
  if (fs::is_regular_file(root / "splits" / "val.txt", ec)) {
    summary.val_images = static_cast<std::int64_t>(read_listing(root / "splits" / "val.txt").size());
  }
  return summary;
}

ValidationReport validate_dataset(const fs::path& root) {
  ValidationReport report;
  auto problem = [&report](std::string text) { report.problems.push_back(std::move(text)); };

  std::vector<DatasetEntry> entries;
  try {
    entries = scan_dataset(root);
  } catch (const Error& e) {
    problem(e.what());
    return report;
  }

  std::map<std::string, const DatasetEntry*> by_image;
  for (const auto& e : entries) {
    by_image[e.image] = &e;
    if (e.records.empty()) problem(e.label + ": no annotations");
    const bool clear = e.condition == WeatherCondition::clear;
    if ((e.subset == Subset::weather) == clear) {
      problem(e.image + ": condition does not match subset " + std::string(to_string(e.subset)));
    }
    const double image_area = static_cast<double>(e.width) * e.height;
    for (std::size_t i = 0; i < e.records.size(); ++i) {
      const std::string where = e.label + ": line " + std::to_string(i + 1);
      const PixelBox box = from_yolo(e.records[i], e.width, e.height);
      if (box.max_side() < kMinBoxSide) {
        problem(where + ": box max side " + std::to_string(box.max_side()) + " px is below " +
                std::to_string(kMinBoxSide));
      }
      if (static_cast<double>(box.area()) > kMaxBoxAreaFraction * image_area) {
        problem(where + ": box covers more than 20% of the image");
      }
      if (e.subset == Subset::vfx && e.records[i].cls == ClassId::bird) {
        problem(where + ": bird label in a vfx frame");
      }
    }
  }

  const fs::path manifest_path = root / "meta" / "manifest.json";
  std::error_code ec;
  if (!fs::is_regular_file(manifest_path, ec)) {
    problem("meta/manifest.json: missing");
    return report;
  }
  Json manifest;
  try {
    manifest = Json::parse(read_text(manifest_path));
  } catch (const Json::exception& e) {
    problem(std::string("meta/manifest.json: ") + e.what());
    return report;
  }

  try {
    std::set<std::string> listed;
    for (const Json& img : manifest.at("images")) {
      const std::string path = img.at("image").get<std::string>();
      listed.insert(path);
      const auto it = by_image.find(path);
      if (it == by_image.end()) {
        problem(path + ": listed in the manifest but missing");
        continue;
      }
      const DatasetEntry& e = *it->second;
      const auto expected = img.at("labels").get<std::size_t>();
      if (e.records.size() != expected) {
        problem(e.label + ": " + std::to_string(e.records.size()) + " labels, manifest records " +
                std::to_string(expected));
      }
      const std::string bucket = img.at("bucket").get<std::string>();
      if (e.bucket && to_string(*e.bucket) != bucket) {
        problem(e.label + ": labels imply bucket " + std::string(to_string(*e.bucket)) +
                ", manifest records " + bucket);
      }
    }
    for (const auto& e : entries) {
      if (!listed.count(e.image)) problem(e.image + ": not listed in the manifest");
    }

    const DatasetSummary recorded = summary_from_json(manifest.at("summary"));
    const DatasetSummary on_disk = compute_stats(root);
    if (!recorded.same_content(on_disk)) {
      std::string detail;
      for (const auto& [k, c] : on_disk.counts) {
        const auto r = recorded.counts.find(k);
        const std::int64_t rc = r == recorded.counts.end() ? 0 : r->second;
        if (rc != c) {
          detail = " (" + key_name(k) + ": " + std::to_string(c) + " on disk, " +
                   std::to_string(rc) + " recorded)";
          break;
        }
      }
      if (detail.empty()) {
        detail = " (instances " + std::to_string(on_disk.class_instances[0]) + "/" +
                 std::to_string(on_disk.class_instances[1]) + " on disk, " +
                 std::to_string(recorded.class_instances[0]) + "/" +
                 std::to_string(recorded.class_instances[1]) + " recorded)";
      }
      problem("meta/manifest.json: summary differs from the files" + detail);
    }
  } catch (const Json::exception& e) {
    problem(std::string("meta/manifest.json: ") + e.what());
  } catch (const Error& e) {
    problem(std::string("meta/manifest.json: ") + e.what());
  }

  const fs::path train = root / "splits" / "train.txt";
  const fs::path val = root / "splits" / "val.txt";
  if (fs::is_regular_file(train, ec) && fs::is_regular_file(val, ec)) {
    std::set<std::string> seen;
    for (const fs::path& listing : {train, val}) {
      for (const auto& line : read_listing(listing)) {
        const std::string where = "splits/" + listing.filename().string() + ": " + line;
        if (!by_image.count(line)) problem(where + ": unknown image");
        if (!seen.insert(line).second) problem(where + ": listed twice");
      }
    }
    if (seen.size() != entries.size()) problem("splits/: listings do not cover every image");
  }
  return report;
}

SplitListing split_dataset(const fs::path& root, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw Error(ErrorCode::out_of_range, "val_fraction must lie in (0, 1)");
  }
  const auto entries = scan_dataset(root);
  // Key: subset, then bucket (-1 for images without labels).
  std::map<std::pair<int, int>, std::vector<std::string>> strata;
  for (const auto& e : entries) {
    const int bucket = e.bucket ? static_cast<int>(*e.bucket) : -1;
    strata[{static_cast<int>(e.subset), bucket}].push_back(e.image);
  }
  std::vector<std::int64_t> sizes;
  for (const auto& [key, images] : strata) {
    if (images.size() < 2) {
      const std::string bucket =
          key.second < 0 ? "unlabeled" : std::string(to_string(static_cast<ContentBucket>(key.second)));
      throw Error(ErrorCode::empty_stratum,
                  std::string(to_string(static_cast<Subset>(key.first))) + "/" + bucket + " has " +
                      std::to_string(images.size()) + " image(s); at least 2 are needed");
    }
    sizes.push_back(static_cast<std::int64_t>(images.size()));
  }
  const auto total = static_cast<double>(entries.size());
  const auto val_total = static_cast<std::int64_t>(std::llround(total * val_fraction));
  const auto allocation = largest_remainder(sizes, val_total);

  SplitListing out;
  std::size_t s = 0;
  for (auto& [key, images] : strata) {
    const std::string stream = "split/" + std::to_string(key.first) + "/" + std::to_string(key.second);
    Rng rng(seed, stream);
    for (std::size_t i = images.size() - 1; i > 0; --i) {
      std::swap(images[i], images[rng.below(i + 1)]);
    }
    const auto take = static_cast<std::size_t>(allocation[s++]);
    out.val.insert(out.val.end(), images.begin(), images.begin() + static_cast<std::ptrdiff_t>(take));
    out.train.insert(out.train.end(), images.begin() + static_cast<std::ptrdiff_t>(take), images.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());

  std::error_code ec;
  fs::create_directories(root / "splits", ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + (root / "splits").string());
  write_listing(root / "splits" / "train.txt", out.train);
  write_listing(root / "splits" / "val.txt", out.val);
  return out;
}

}  // namespace aerosynth
