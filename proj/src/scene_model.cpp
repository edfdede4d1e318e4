#include "aerosynth/scene_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aerosynth/error.hpp"
#include "aerosynth/rng.hpp"

namespace aerosynth {

std::string_view to_string(ClassId cls) {
  return cls == ClassId::drone ? "drone" : "bird";
}

std::string_view to_string(PayloadKind payload) {
  switch (payload) {
    case PayloadKind::none: return "none";
    case PayloadKind::box: return "box";
    case PayloadKind::bag: return "bag";
    case PayloadKind::gun: return "gun";
    case PayloadKind::spray_kit: return "spray_kit";
  }
  return "unknown";
}

std::string_view to_string(ProfileId id) {
  switch (id) {
    case ProfileId::urban_towers: return "urban_towers";
    case ProfileId::park: return "park";
    case ProfileId::dynamic_city: return "dynamic_city";
    case ProfileId::city_blocks: return "city_blocks";
    case ProfileId::downtown: return "downtown";
    case ProfileId::bridge_water: return "bridge_water";
    case ProfileId::rural_terrain: return "rural_terrain";
  }
  return "unknown";
}

std::optional<ProfileId> parse_profile(std::string_view name) {
  for (ProfileId id : kAllProfiles) {
    if (to_string(id) == name) {
      return id;
    }
  }
  return std::nullopt;
}

namespace {

EnvironmentProfile make_profile(ProfileId id, Rgb8 top, Rgb8 horizon, double amplitude,
                                double frequency, double density, double h_min, double h_max,
                                Rgb8 ground, Rgb8 terrain, Rgb8 structure) {
  EnvironmentProfile p;
  p.id = id;
  p.sky_top = top;
  p.sky_horizon = horizon;
  p.terrain_amplitude = amplitude;
  p.terrain_frequency = frequency;
  p.structure_density = density;
  p.structure_height_min = h_min;
  p.structure_height_max = h_max;
  p.ground_color = ground;
  p.terrain_color = terrain;
  p.structure_color = structure;
  p.sun_azimuth = deg_to_rad(135.0);
  p.sun_elevation = deg_to_rad(40.0);
  p.ambient_level = 0.35;
  return p;
}

const std::array<EnvironmentProfile, 7> kProfiles{
    make_profile(ProfileId::urban_towers, {70, 110, 170}, {185, 200, 220}, 20, 3, 60, 40, 88,
                 {92, 92, 98}, {95, 110, 95}, {150, 156, 168}),
    make_profile(ProfileId::park, {80, 130, 195}, {195, 215, 230}, 25, 4, 8, 10, 30,
                 {78, 128, 66}, {70, 110, 70}, {170, 150, 130}),
    make_profile(ProfileId::dynamic_city, {90, 120, 165}, {200, 205, 215}, 15, 3, 40, 20, 70,
                 {100, 100, 106}, {100, 110, 100}, {135, 130, 125}),
    make_profile(ProfileId::city_blocks, {75, 125, 185}, {190, 210, 228}, 15, 5, 30, 15, 45,
                 {105, 104, 100}, {90, 115, 90}, {175, 160, 140}),
    make_profile(ProfileId::downtown, {85, 115, 160}, {205, 205, 210}, 20, 3, 50, 30, 88,
                 {88, 88, 92}, {100, 105, 100}, {120, 130, 145}),
    make_profile(ProfileId::bridge_water, {95, 140, 200}, {200, 220, 235}, 35, 2, 4, 10, 40,
                 {58, 88, 128}, {80, 105, 85}, {160, 150, 140}),
    make_profile(ProfileId::rural_terrain, {100, 145, 205}, {215, 215, 200}, 40, 2, 1, 4, 10,
                 {150, 130, 88}, {120, 110, 75}, {140, 100, 80}),
};

Rgb8 tint(Rng& rng, Rgb8 c, int amount) {
  auto j = [&](std::uint8_t v) {
    return static_cast<std::uint8_t>(std::clamp(v + rng.range(-amount, amount), 0, 255));
  };
  return {j(c.r), j(c.g), j(c.b)};
}

}  // namespace

const EnvironmentProfile& environment_profile(ProfileId id) {
  return kProfiles[static_cast<std::size_t>(id)];
}

EnvironmentProfile randomize_environment(const EnvironmentProfile& base, std::uint64_t seed) {
  Rng rng(seed, "environment");
  EnvironmentProfile env = base;
  env.sun_azimuth = rng.uniform(0.0, 2.0 * kPi);
  env.sun_elevation = deg_to_rad(rng.uniform(15.0, 70.0));
  env.ambient_level = rng.uniform(0.25, 0.5);
  env.sky_top = tint(rng, base.sky_top, 10);
  env.sky_horizon = tint(rng, base.sky_horizon, 10);
  return env;
}

std::string_view to_string(WeatherCondition condition) {
  switch (condition) {
    case WeatherCondition::clear: return "clear";
    case WeatherCondition::fog: return "fog";
    case WeatherCondition::snow: return "snow";
    case WeatherCondition::other: return "other";
  }
  return "unknown";
}

std::optional<WeatherCondition> parse_condition(std::string_view name) {
  for (auto c : {WeatherCondition::clear, WeatherCondition::fog, WeatherCondition::snow,
                 WeatherCondition::other}) {
    if (to_string(c) == name) {
      return c;
    }
  }
  return std::nullopt;
}

void WeatherParams::validate() const {
  auto in_unit = [](double s) { return s >= 0.0 && s <= 1.0; };
  if (!in_unit(severity) || !in_unit(snow_severity)) {
    throw Error(ErrorCode::severity_range, "weather severity must lie in [0, 1]");
  }
  const bool clear_condition = condition == WeatherCondition::clear;
  if (clear_condition != (severity == 0.0)) {
    throw Error(ErrorCode::severity_range, "severity is zero exactly when the sky is clear");
  }
  if (condition == WeatherCondition::other && !(snow_severity > 0.0)) {
    throw Error(ErrorCode::severity_range, "'other' weather needs a positive snow severity");
  }
  if (condition != WeatherCondition::other && snow_severity != 0.0) {
    throw Error(ErrorCode::severity_range, "snow_severity is only used by 'other' weather");
  }
}

std::string_view to_string(ContentBucket bucket) {
  switch (bucket) {
    case ContentBucket::drone_only: return "drone_only";
    case ContentBucket::bird_only: return "bird_only";
    case ContentBucket::both: return "both";
    case ContentBucket::vfx_drone: return "vfx_drone";
  }
  return "unknown";
}

std::optional<ContentBucket> parse_bucket(std::string_view name) {
  for (auto b : {ContentBucket::drone_only, ContentBucket::bird_only, ContentBucket::both,
                 ContentBucket::vfx_drone}) {
    if (to_string(b) == name) {
      return b;
    }
  }
  return std::nullopt;
}

InstanceClassTable annotatable_classes(const Scene& scene, const AssetLibrary& library) {
  InstanceClassTable table;
  for (const auto& inst : scene.instances) {
    if (inst.annotatable && inst.asset_index) {
      table.emplace(inst.instance_id, library.at(*inst.asset_index).cls);
    }
  }
  return table;
}

namespace {

struct ScreenRect {
  double x0, y0, x1, y1;
  double area() const { return std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0); }
};

double overlap(const ScreenRect& a, const ScreenRect& b) {
  return ScreenRect{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
                    std::min(a.y1, b.y1)}
      .area();
}

/// Screen bounds of the posed mesh, or nullopt if any vertex is behind the camera.
std::optional<ScreenRect> projected_bounds(const Mesh& mesh, const Pose& pose,
                                           const CameraView& camera) {
  ScreenRect r{1e300, 1e300, -1e300, -1e300};
  const Mat3 rot = pose.rotation();
  for (const auto& tri : mesh) {
    for (const Vec3* v : {&tri.a, &tri.b, &tri.c}) {
      const auto px = project(camera, pose.position + rot * (*v * pose.scale));
      if (!px) {
        return std::nullopt;
      }
      r.x0 = std::min(r.x0, px->u);
      r.y0 = std::min(r.y0, px->v);
      r.x1 = std::max(r.x1, px->u);
      r.y1 = std::max(r.y1, px->v);
    }
  }
  return r;
}

class Placer {
 public:
  Placer(const CameraView& camera, const PlacementConfig& cfg, Rng& rng, double time)
      : camera_(camera), cfg_(cfg), rng_(rng), time_(time) {}

  /// Random point in the camera's view inside the airspace shell, or nullopt.
  std::optional<Vec3> sample_point(double min_range, double max_range) {
    const auto& k = camera_.intrinsics();
    const double bearing = rng_.uniform(-0.45, 0.45) * k.hfov();
    const double elevation = camera_.extrinsics().elevation + rng_.uniform(-0.45, 0.45) * k.vfov();
    const double range = std::exp(rng_.uniform(std::log(min_range), std::log(max_range)));
    const double azimuth = camera_.extrinsics().azimuth + bearing;
    const Vec3 origin = camera_.position();
    const Vec3 p{origin.x + range * std::cos(azimuth), origin.y - range * std::sin(azimuth),
                 origin.z + range * std::tan(elevation)};
    if (p.z < cfg_.min_altitude || p.z > cfg_.max_altitude) {
      return std::nullopt;
    }
    const double dist = norm(p - origin);
    if (dist < min_range || dist > max_range) {
      return std::nullopt;
    }
    return p;
  }

  /// Path of the given kind that passes through `p` at the scene time.
  TrajectorySpec path_through(const Vec3& p, TrajectoryKind kind) {
    const double duration = cfg_.sequence_duration;
    const double s = time_ / duration;
    TrajectorySpec spec;
    spec.kind = kind;
    const double radius = rng_.uniform(cfg_.min_radius, cfg_.max_radius);
    const double period = rng_.uniform(cfg_.min_period, cfg_.max_period);
    spec.angular_speed = (rng_.chance(0.5) ? 1.0 : -1.0) * 2.0 * kPi / period;
    const double theta = rng_.uniform(0.0, 2.0 * kPi);
    spec.phase = theta - spec.angular_speed * time_;
    double altitude = p.z;
    spec.radius_start = spec.radius_end = radius;
    if (kind == TrajectoryKind::spiral) {
      const double dr = rng_.uniform(-0.5, 0.5) * radius;
      spec.radius_start = radius - dr * s;
      spec.radius_end = radius + dr * (1.0 - s);
      const double da = rng_.uniform(-10.0, 10.0);
      spec.altitude_start = altitude - da * s;
      spec.altitude_end = altitude + da * (1.0 - s);
    } else {
      if (kind == TrajectoryKind::bird) {
        spec.bob_amplitude = rng_.uniform(0.05, 0.3);
        spec.flap_frequency = rng_.uniform(1.5, 4.0);
        altitude -= spec.bob_amplitude * std::sin(2.0 * kPi * spec.flap_frequency * time_);
      }
      spec.altitude_start = spec.altitude_end = altitude;
    }
    spec.center = {p.x - radius * std::cos(theta), p.y - radius * std::sin(theta), 0.0};
    return spec;
  }

  const CameraView& camera() const { return camera_; }

 private:
  const CameraView& camera_;
  const PlacementConfig& cfg_;
  Rng& rng_;
  double time_;
};

}  // namespace

Scene sample_scene(ContentBucket bucket, const EnvironmentProfile& environment,
                   const WeatherParams& weather, const AssetLibrary& library, std::uint64_t seed,
                   const CameraView& target, const PlacementConfig& placement) {
  weather.validate();
  std::vector<std::size_t> drones, birds;
  for (std::size_t i = 0; i < library.size(); ++i) {
    (library[i].cls == ClassId::drone ? drones : birds).push_back(i);
  }
  const bool wants_drones = bucket != ContentBucket::bird_only;
  const bool wants_birds = bucket == ContentBucket::bird_only || bucket == ContentBucket::both;
  if ((wants_drones && drones.empty()) || (wants_birds && birds.empty())) {
    throw Error(ErrorCode::rejection_exhausted, "asset library lacks the classes the bucket needs");
  }

  Rng rng(seed, "scene");
  Scene scene;
  scene.environment = environment;
  scene.weather = weather;
  scene.seed = seed;
  scene.duration = placement.sequence_duration;
  scene.time = rng.uniform(0.0, placement.sequence_duration);

  int drone_count = 0, bird_count = 0, flock_groups = 0;
  switch (bucket) {
    case ContentBucket::drone_only: drone_count = rng.range(1, 3); break;
    case ContentBucket::bird_only: bird_count = rng.range(1, 3); break;
    case ContentBucket::both:
      drone_count = rng.range(1, 2);
      bird_count = rng.range(1, 2);
      break;
    case ContentBucket::vfx_drone:
      drone_count = rng.range(1, 3);
      flock_groups = rng.range(1, 2);
      break;
  }

  Placer placer(target, placement, rng, scene.time);
  const double image_area = static_cast<double>(target.width()) * target.height();
  const ScreenRect image{0, 0, static_cast<double>(target.width()),
                         static_cast<double>(target.height())};
  std::vector<ScreenRect> placed;
  int attempts = 0;
  std::uint32_t next_id = 1;

  auto exhausted = [&]() {
    return Error(ErrorCode::rejection_exhausted,
                 "no valid placement for bucket " + std::string(to_string(bucket)) + " after " +
                     std::to_string(placement.max_attempts) + " attempts");
  };

  auto place_asset = [&](std::size_t asset_index) {
    const AssetModel& asset = library[asset_index];
    while (true) {
      if (++attempts > placement.max_attempts) {
        throw exhausted();
      }
      const auto point = placer.sample_point(placement.min_range, placement.max_range);
      if (!point) {
        continue;
      }
      TrajectoryKind kind = TrajectoryKind::bird;
      if (asset.cls == ClassId::drone) {
        kind = rng.chance(0.5) ? TrajectoryKind::circular : TrajectoryKind::spiral;
      }
      ObjectInstance inst;
      inst.asset_index = asset_index;
      inst.annotatable = true;
      inst.trajectory = placer.path_through(*point, kind);
      inst.pose = pose_at(inst.trajectory, scene.time, scene.duration);
      inst.pose.scale = rng.uniform(asset.scale_range.min, asset.scale_range.max);

      const auto rect = projected_bounds(asset.mesh, inst.pose, target);
      if (!rect) {
        continue;
      }
      const ScreenRect visible{std::max(rect->x0, 0.0), std::max(rect->y0, 0.0),
                               std::min(rect->x1, image.x1), std::min(rect->y1, image.y1)};
      const double extent = std::max(visible.x1 - visible.x0, visible.y1 - visible.y0);
      if (extent < placement.min_projected_extent ||
          rect->area() > placement.max_projected_area_fraction * image_area) {
        continue;
      }
      const double cu = (rect->x0 + rect->x1) / 2, cv = (rect->y0 + rect->y1) / 2;
      if (cu < 0 || cv < 0 || cu >= image.x1 || cv >= image.y1) {
        continue;
      }
      const bool crowded = std::any_of(placed.begin(), placed.end(), [&](const ScreenRect& o) {
        return overlap(*rect, o) > 0.3 * std::min(rect->area(), o.area());
      });
      if (crowded) {
        continue;
      }
      placed.push_back(*rect);
      inst.instance_id = next_id++;
      scene.instances.push_back(inst);
      return;
    }
  };

  for (int i = 0; i < drone_count; ++i) {
    place_asset(drones[rng.below(drones.size())]);
  }
  for (int i = 0; i < bird_count; ++i) {
    place_asset(birds[rng.below(birds.size())]);
  }

  for (int g = 0; g < flock_groups; ++g) {
    std::optional<Vec3> center;
    while (!center) {
      if (++attempts > placement.max_attempts) {
        throw exhausted();
      }
      center = placer.sample_point(placement.flock_min_range, placement.flock_max_range);
    }
    const TrajectorySpec group = placer.path_through(*center, TrajectoryKind::bird);
    const int count = rng.range(kMinFlockSize, kMaxFlockSize);
    const auto particles = spawn_flock(group, count, mix_seed(stream_seed(seed, "flock"), g));
    for (const auto& spec : particles) {
      ObjectInstance inst;
      inst.instance_id = next_id++;
      inst.annotatable = false;
      inst.trajectory = spec;
      inst.pose = pose_at(spec, scene.time, scene.duration);
      inst.pose.scale = rng.uniform(placement.particle_min_size, placement.particle_max_size);
      scene.instances.push_back(inst);
    }
  }
  return scene;
}

}  // namespace aerosynth
