#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aerosynth/annotation.hpp"
#include "aerosynth/camera_rig.hpp"
#include "aerosynth/renderer.hpp"
#include "aerosynth/scene_model.hpp"
#include "aerosynth/serialization.hpp"

namespace aerosynth {

enum class Subset { non_vfx, vfx, weather };

inline constexpr std::array<Subset, 3> kAllSubsets{Subset::non_vfx, Subset::vfx, Subset::weather};

/// Directory and filename token: "nonvfx", "vfx", "weather".
std::string_view to_string(Subset subset);
std::optional<Subset> parse_subset(std::string_view token);

struct CompositionTarget {
  Subset subset = Subset::non_vfx;
  ContentBucket bucket = ContentBucket::drone_only;
  ProfileId scene = ProfileId::park;
  WeatherCondition condition = WeatherCondition::clear;
  std::int64_t count = 0;
  /// Fixed severity (percent) instead of drawing from the condition's grid.
  std::optional<int> severity_percent;
  std::optional<int> snow_severity_percent;  ///< `other` only

  /// Throws invalid_targets when subset, bucket and condition disagree.
  void validate() const;
  bool operator==(const CompositionTarget&) const = default;
};

struct RigConfig {
  int camera_count = 6;
  double hfov_deg = 60.0;
  Vec3 position{0.0, 0.0, 1.8};
  double elevation_deg = 0.0;

  Rig build(int width, int height) const;
};

enum class PlanProfile { reference_proportions, custom };

std::string_view to_string(PlanProfile profile);
std::optional<PlanProfile> parse_plan_profile(std::string_view name);

/// Validation share of the reference train/val split (6,461 of 53,083 images).
inline constexpr double kDefaultValFraction = 6461.0 / 53083.0;

struct DatasetPlan {
  std::vector<CompositionTarget> targets;
  PlanProfile profile = PlanProfile::reference_proportions;
  RigConfig rig;
  int width = 1920;
  int height = 1080;
  std::uint64_t master_seed = 0;
  int layout_version = 1;
  PlacementConfig placement;
  bool write_masks = true;
  bool write_depth = false;
  double val_fraction = kDefaultValFraction;

  std::int64_t total() const;
};

/// Image counts of the reference composition tables, scaled to `total_images`.
/// Subset totals, per-subset bucket counts, scene counts and per-condition
/// weather counts are apportioned by largest remainder so every level sums
/// exactly. Weather frames are spread over scenes like the clear frames of the
/// same bucket so each can be paired with a clear layout. `custom` uses
/// `custom_targets` verbatim after validation; their counts must sum to
/// `total_images`. Throws invalid_targets.
DatasetPlan plan_dataset(std::int64_t total_images, PlanProfile profile,
                         std::span<const CompositionTarget> custom_targets = {});

/// One image to produce.
struct FrameJob {
  std::size_t index = 0;
  Subset subset = Subset::non_vfx;
  ContentBucket bucket = ContentBucket::drone_only;
  ProfileId scene = ProfileId::park;
  WeatherParams weather;
  int fog_percent = 0;
  int snow_percent = 0;
  int camera = 0;
  std::uint64_t frame_seed = 0;
  std::uint64_t scene_seed = 0;          ///< equals the paired clear frame's seed when paired
  std::optional<std::size_t> paired_with;  ///< clear frame sharing this layout
  std::string basename;
};

/// Expands the plan into jobs in target order. Frame seeds derive from
/// (master_seed, index); cameras go round-robin; weather frames borrow the scene
/// seed and camera of a clear frame of the same bucket and scene when one exists.
std::vector<FrameJob> schedule_frames(const DatasetPlan& plan);

/// Everything generation needs that does not change between frames.
struct GenerationContext {
  DatasetPlan plan;
  Rig rig;
  AssetLibrary library;

  explicit GenerationContext(DatasetPlan plan);
};

struct FrameProduct {
  Scene scene;
  FrameBundle frame;  ///< weather applied
  AnnotationResult annotation;
  RenderStats render_stats;
  int attempts = 0;
};

/// Retry limit for frames whose final labels break the bucket or size band.
inline constexpr int kMaxFrameAttempts = 1000;

/// Samples, renders, annotates and applies weather for one job; retries with
/// derived seeds until the labels match the bucket and the size band. Throws
/// generation_failed.
FrameProduct produce_frame(const GenerationContext& context, const FrameJob& job);

/// Composition key of one image.
struct CompositionKey {
  Subset subset = Subset::non_vfx;
  ContentBucket bucket = ContentBucket::drone_only;
  ProfileId scene = ProfileId::park;
  WeatherCondition condition = WeatherCondition::clear;
  auto operator<=>(const CompositionKey&) const = default;
};

/// Lower edges of the box max-side histogram bins (pixels).
inline constexpr std::array<int, 10> kBoxHistogramEdges{0, 5, 8, 16, 32, 64, 128, 256, 512, 1024};

struct DatasetSummary {
  std::map<CompositionKey, std::int64_t> counts;
  std::array<std::int64_t, 2> class_instances{};  ///< indexed by ClassId
  std::array<std::int64_t, kBoxHistogramEdges.size()> box_histogram{};
  int min_box_side = 0;  ///< smallest box max-side over all annotations
  int max_box_side = 0;
  std::int64_t images = 0;
  std::int64_t train_images = 0;  ///< from splits/, 0 when absent
  std::int64_t val_images = 0;
  double wall_seconds = 0.0;  ///< generation only; never written to disk

  void add_image(const CompositionKey& key, std::span<const PixelBox> boxes,
                 std::span<const AnnotationRecord> records);
  std::int64_t subset_total(Subset subset) const;
  std::int64_t bucket_count(Subset subset, ContentBucket bucket) const;
  std::int64_t scene_count(Subset subset, ProfileId scene) const;
  std::int64_t condition_count(WeatherCondition condition,
                               std::optional<ContentBucket> bucket = std::nullopt) const;
  /// Equality of everything except wall time.
  bool same_content(const DatasetSummary& other) const;
};

Json to_json(const DatasetSummary& summary);
DatasetSummary summary_from_json(const Json& j);

struct GenerateOptions {
  std::function<void(std::string_view)> log;  ///< warnings, e.g. oversize resampling
};

/// Writes images/, labels/, masks/ (optional), depth/ (optional) and
/// meta/manifest.json under `output_dir`, which must be empty or absent. Output
/// bytes are independent of `workers`.
DatasetSummary generate_dataset(const DatasetPlan& plan, const std::filesystem::path& output_dir,
                                int workers, const GenerateOptions& options = {});

/// One image found on disk.
struct DatasetEntry {
  std::string image;  ///< relative path
  std::string label;  ///< relative path
  std::string basename;
  Subset subset = Subset::non_vfx;
  ProfileId scene = ProfileId::park;
  WeatherCondition condition = WeatherCondition::clear;
  int width = 0;
  int height = 0;
  std::vector<AnnotationRecord> records;
  std::optional<ContentBucket> bucket;  ///< from labels; empty when no labels
};

struct ParsedName {
  ProfileId scene;
  Subset subset;
  WeatherCondition condition;
  int fog_percent;
  int snow_percent;
  std::size_t frame_index;
  int camera;
};

std::string format_basename(const ParsedName& name);

/// Splits `{scene}_{subset}_{condition}{severity}_{frame}_cam{n}`; nullopt if malformed.
std::optional<ParsedName> parse_basename(std::string_view basename);

/// Lists and parses every image/label pair. Throws layout_invalid naming the file.
std::vector<DatasetEntry> scan_dataset(const std::filesystem::path& dataset_dir);

/// Composition recomputed from the files alone (the manifest is not read).
DatasetSummary compute_stats(const std::filesystem::path& dataset_dir);

struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

/// Layout, label grammar, size band, bird-free VFX labels and agreement with
/// the manifest.
ValidationReport validate_dataset(const std::filesystem::path& dataset_dir);

struct SplitListing {
  std::vector<std::string> train;  ///< relative image paths, sorted
  std::vector<std::string> val;
};

/// Stratified by subset x bucket, validation counts apportioned by largest
/// remainder. Writes splits/train.txt and splits/val.txt. Throws empty_stratum.
SplitListing split_dataset(const std::filesystem::path& dataset_dir, double val_fraction,
                           std::uint64_t seed);

}  // namespace aerosynth
