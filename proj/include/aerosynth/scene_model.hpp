#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aerosynth/camera_rig.hpp"
#include "aerosynth/geometry.hpp"
#include "aerosynth/image.hpp"
#include "aerosynth/trajectory.hpp"

namespace aerosynth {

/// The two annotatable classes; the value is the label-file class index.
enum class ClassId : int { drone = 0, bird = 1 };

enum class PayloadKind { none, box, bag, gun, spray_kit };

std::string_view to_string(ClassId cls);
std::string_view to_string(PayloadKind payload);

struct ScaleRange {
  double min = 1.0;
  double max = 1.0;
  bool operator==(const ScaleRange&) const = default;
};

struct AssetModel {
  std::string asset_id;
  ClassId cls = ClassId::drone;
  PayloadKind payload = PayloadKind::none;
  Mesh mesh;  ///< model space, meters; +x forward, +z up
  Rgb8 base_color;
  Rgb8 accent_color;
  ScaleRange scale_range;

  bool operator==(const AssetModel&) const = default;
};

using AssetLibrary = std::vector<AssetModel>;

inline constexpr int kDroneAssetCount = 15;
inline constexpr int kPayloadDroneCount = 8;
inline constexpr int kBirdAssetCount = 8;

/// 15 drones (8 carrying payloads) followed by 8 birds. Meshes depend only on the
/// asset index; colors and scale ranges are drawn from `seed`.
AssetLibrary build_asset_library(std::uint64_t seed);

enum class ProfileId {
  urban_towers,
  park,
  dynamic_city,
  city_blocks,
  downtown,
  bridge_water,
  rural_terrain,
};

inline constexpr std::array<ProfileId, 7> kAllProfiles{
    ProfileId::urban_towers, ProfileId::park,         ProfileId::dynamic_city,
    ProfileId::city_blocks,  ProfileId::downtown,     ProfileId::bridge_water,
    ProfileId::rural_terrain};

std::string_view to_string(ProfileId id);
std::optional<ProfileId> parse_profile(std::string_view name);

struct EnvironmentProfile {
  ProfileId id = ProfileId::park;
  Rgb8 sky_top;
  Rgb8 sky_horizon;
  double terrain_amplitude = 0.0;  ///< m, height of the distant hill ring
  double terrain_frequency = 0.0;  ///< hill undulations per radian of azimuth
  double structure_density = 0.0;  ///< buildings per km^2
  double structure_height_min = 0.0;
  double structure_height_max = 0.0;
  Rgb8 ground_color;
  Rgb8 terrain_color;
  Rgb8 structure_color;
  double sun_azimuth = 0.0;  ///< counterclockwise from +x
  double sun_elevation = 0.0;
  double ambient_level = 0.3;

  bool operator==(const EnvironmentProfile&) const = default;
};

const EnvironmentProfile& environment_profile(ProfileId id);

/// Time-of-day style variation of a base profile: sun position, ambient level and
/// sky tint.
EnvironmentProfile randomize_environment(const EnvironmentProfile& base, std::uint64_t seed);

enum class WeatherCondition { clear, fog, snow, other };

std::string_view to_string(WeatherCondition condition);
std::optional<WeatherCondition> parse_condition(std::string_view name);

/// Severity levels (percent) used when a fog or snow frame is configured.
inline constexpr std::array<int, 6> kFogGridPercent{2, 4, 6, 8, 10, 12};
inline constexpr std::array<int, 6> kSnowGridPercent{5, 15, 25, 35, 45, 55};

/// Weather state of a frame. Severities are fractions in [0, 1]. The `other`
/// condition composes fog at `severity` with snow at `snow_severity`.
struct WeatherParams {
  WeatherCondition condition = WeatherCondition::clear;
  double severity = 0.0;
  double snow_severity = 0.0;

  static WeatherParams clear() { return {}; }
  /// Throws severity_range when the condition/severity pairing is inconsistent.
  void validate() const;
  bool operator==(const WeatherParams&) const = default;
};

enum class ContentBucket { drone_only, bird_only, both, vfx_drone };

std::string_view to_string(ContentBucket bucket);
std::optional<ContentBucket> parse_bucket(std::string_view name);

struct ObjectInstance {
  std::uint32_t instance_id = 0;            ///< >= 1; 0 is the segmentation background
  std::optional<std::size_t> asset_index;   ///< empty for flock particles
  Pose pose;                                ///< flock particles: scale is the billboard size
  bool annotatable = true;
  TrajectorySpec trajectory;

  bool is_flock_particle() const { return !asset_index.has_value(); }
  bool operator==(const ObjectInstance&) const = default;
};

struct Scene {
  std::vector<ObjectInstance> instances;
  EnvironmentProfile environment;
  WeatherParams weather;
  double time = 0.0;
  double duration = 60.0;
  std::uint64_t seed = 0;

  bool operator==(const Scene&) const = default;
};

/// instance_id -> class for every annotatable instance.
using InstanceClassTable = std::map<std::uint32_t, ClassId>;

InstanceClassTable annotatable_classes(const Scene& scene, const AssetLibrary& library);

/// Airspace and size-band limits used by sample_scene.
struct PlacementConfig {
  double min_range = 5.0;  ///< m, distance from the rig
  double max_range = 150.0;
  double min_altitude = 2.0;
  double max_altitude = 60.0;
  int max_attempts = 1000;
  double sequence_duration = 60.0;
  double min_radius = 8.0;
  double max_radius = 120.0;
  double min_period = 20.0;
  double max_period = 120.0;
  /// Projected mesh bounds must reach this many pixels on the longer side...
  double min_projected_extent = 6.0;
  /// ...and cover at most this fraction of the image.
  double max_projected_area_fraction = 0.18;
  double flock_min_range = 8.0;
  double flock_max_range = 40.0;
  double particle_min_size = 0.1;
  double particle_max_size = 0.3;
};

/// Samples a scene whose content satisfies `bucket` and whose annotatable
/// instances project into `target` inside the size band. Deterministic in all
/// arguments. Throws rejection_exhausted once `max_attempts` placements fail.
Scene sample_scene(ContentBucket bucket, const EnvironmentProfile& environment,
                   const WeatherParams& weather, const AssetLibrary& library, std::uint64_t seed,
                   const CameraView& target, const PlacementConfig& placement = {});

}  // namespace aerosynth
