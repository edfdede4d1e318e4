#include "aerosynth/serialization.hpp"

#include <cstring>

#include "aerosynth/error.hpp"
#include "aerosynth/rng.hpp"

namespace aerosynth {

Json to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

Json to_json(Rgb8 c) { return Json::array({c.r, c.g, c.b}); }

Json to_json(const Pose& pose) {
  Json j;
  j["position"] = to_json(pose.position);
  j["yaw"] = pose.yaw;
  j["pitch"] = pose.pitch;
  j["roll"] = pose.roll;
  j["scale"] = pose.scale;
  return j;
}

Json to_json(const TrajectorySpec& s) {
  Json j;
  j["kind"] = std::string(to_string(s.kind));
  j["center"] = to_json(s.center);
  j["radius_start"] = s.radius_start;
  j["radius_end"] = s.radius_end;
  j["altitude_start"] = s.altitude_start;
  j["altitude_end"] = s.altitude_end;
  j["angular_speed"] = s.angular_speed;
  j["phase"] = s.phase;
  j["bob_amplitude"] = s.bob_amplitude;
  j["flap_frequency"] = s.flap_frequency;
  return j;
}

TrajectorySpec trajectory_from_json(const Json& j) {
  TrajectorySpec s;
  const std::string kind = j.at("kind").get<std::string>();
  bool known = false;
  for (auto k : {TrajectoryKind::circular, TrajectoryKind::spiral, TrajectoryKind::bird,
                 TrajectoryKind::flock_particle}) {
    if (to_string(k) == kind) {
      s.kind = k;
      known = true;
    }
  }
  if (!known) {
    throw Error(ErrorCode::config_parse, "unknown trajectory kind '" + kind + "'");
  }
  const auto& c = j.at("center");
  s.center = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
  s.radius_start = j.at("radius_start").get<double>();
  s.radius_end = j.at("radius_end").get<double>();
  s.altitude_start = j.at("altitude_start").get<double>();
  s.altitude_end = j.at("altitude_end").get<double>();
  s.angular_speed = j.at("angular_speed").get<double>();
  s.phase = j.at("phase").get<double>();
  s.bob_amplitude = j.at("bob_amplitude").get<double>();
  s.flap_frequency = j.at("flap_frequency").get<double>();
  return s;
}

Json to_json(const WeatherParams& w) {
  Json j;
  j["condition"] = std::string(to_string(w.condition));
  j["severity"] = w.severity;
  if (w.condition == WeatherCondition::other) {
    j["snow_severity"] = w.snow_severity;
  }
  return j;
}

Json to_json(const EnvironmentProfile& env) {
  Json j;
  j["profile"] = std::string(to_string(env.id));
  j["sky_top"] = to_json(env.sky_top);
  j["sky_horizon"] = to_json(env.sky_horizon);
  j["terrain_amplitude"] = env.terrain_amplitude;
  j["terrain_frequency"] = env.terrain_frequency;
  j["structure_density"] = env.structure_density;
  j["structure_height"] = Json::array({env.structure_height_min, env.structure_height_max});
  j["ground_color"] = to_json(env.ground_color);
  j["terrain_color"] = to_json(env.terrain_color);
  j["structure_color"] = to_json(env.structure_color);
  j["sun_azimuth"] = env.sun_azimuth;
  j["sun_elevation"] = env.sun_elevation;
  j["ambient_level"] = env.ambient_level;
  return j;
}

Json to_json(const ObjectInstance& inst, const AssetLibrary& library) {
  Json j;
  j["instance_id"] = inst.instance_id;
  if (inst.asset_index) {
    const auto& asset = library.at(*inst.asset_index);
    j["asset"] = asset.asset_id;
    j["class"] = std::string(to_string(asset.cls));
  } else {
    j["asset"] = nullptr;
    j["class"] = nullptr;
  }
  j["annotatable"] = inst.annotatable;
  j["pose"] = to_json(inst.pose);
  j["trajectory"] = to_json(inst.trajectory);
  return j;
}

Json to_json(const Scene& scene, const AssetLibrary& library) {
  Json j;
  j["seed"] = scene.seed;
  j["time"] = scene.time;
  j["duration"] = scene.duration;
  j["environment"] = to_json(scene.environment);
  j["weather"] = to_json(scene.weather);
  Json instances = Json::array();
  for (const auto& inst : scene.instances) {
    instances.push_back(to_json(inst, library));
  }
  j["instances"] = std::move(instances);
  return j;
}

Json to_json(const AssetModel& asset) {
  Json j;
  j["asset_id"] = asset.asset_id;
  j["class"] = std::string(to_string(asset.cls));
  j["payload"] = std::string(to_string(asset.payload));
  j["base_color"] = to_json(asset.base_color);
  j["accent_color"] = to_json(asset.accent_color);
  j["scale_range"] = Json::array({asset.scale_range.min, asset.scale_range.max});
  Json mesh = Json::array();
  for (const auto& t : asset.mesh) {
    mesh.push_back(Json::array({to_json(t.a), to_json(t.b), to_json(t.c),
                                static_cast<int>(t.material)}));
  }
  j["mesh"] = std::move(mesh);
  return j;
}

Json to_json(const AssetLibrary& library) {
  Json j = Json::array();
  for (const auto& asset : library) {
    j.push_back(to_json(asset));
  }
  return j;
}

Json to_json(const Rig& rig) {
  Json cams = Json::array();
  for (std::size_t i = 0; i < rig.size(); ++i) {
    const auto& cam = rig[i];
    const auto& k = cam.intrinsics();
    Json c;
    c["index"] = i;
    c["name"] = "cam" + std::to_string(i);
    c["azimuth_rad"] = cam.extrinsics().azimuth;
    c["azimuth_deg"] = rad_to_deg(cam.extrinsics().azimuth);
    c["elevation_rad"] = cam.extrinsics().elevation;
    c["position"] = to_json(cam.position());
    c["width"] = k.width;
    c["height"] = k.height;
    c["focal_px"] = k.focal_px;
    c["principal_point"] = Json::array({k.cx, k.cy});
    cams.push_back(std::move(c));
  }
  Json j;
  j["hfov_rad"] = rig.hfov;
  j["cameras"] = std::move(cams);
  return j;
}

std::string serialize(const Scene& scene, const AssetLibrary& library) {
  return to_json(scene, library).dump(2);
}

std::string serialize(const AssetLibrary& library) { return to_json(library).dump(2); }

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

std::uint64_t topology_hash(const AssetLibrary& library) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& asset : library) {
    hash_bytes(h, asset.asset_id.data(), asset.asset_id.size());
    for (const auto& t : asset.mesh) {
      for (const Vec3* v : {&t.a, &t.b, &t.c}) {
        const double xyz[3] = {v->x, v->y, v->z};
        hash_bytes(h, xyz, sizeof xyz);
      }
      const auto m = static_cast<std::uint8_t>(t.material);
      hash_bytes(h, &m, 1);
    }
  }
  return h;
}

std::uint64_t color_hash(const AssetLibrary& library) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& asset : library) {
    hash_bytes(h, &asset.base_color, sizeof(Rgb8));
    hash_bytes(h, &asset.accent_color, sizeof(Rgb8));
  }
  return h;
}

}  // namespace aerosynth
