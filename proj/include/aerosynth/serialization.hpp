#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "aerosynth/camera_rig.hpp"
#include "aerosynth/scene_model.hpp"
#include "aerosynth/trajectory.hpp"

namespace aerosynth {

/// Structured text with a fixed field order; every serializer below emits keys
/// in declaration order.
using Json = nlohmann::ordered_json;

Json to_json(const Vec3& v);
Json to_json(Rgb8 c);
Json to_json(const Pose& pose);
Json to_json(const TrajectorySpec& spec);
Json to_json(const WeatherParams& weather);
Json to_json(const EnvironmentProfile& env);
Json to_json(const ObjectInstance& inst, const AssetLibrary& library);
Json to_json(const Scene& scene, const AssetLibrary& library);
Json to_json(const AssetModel& asset);
Json to_json(const AssetLibrary& library);
Json to_json(const Rig& rig);

TrajectorySpec trajectory_from_json(const Json& j);

/// Pretty-printed JSON text.
std::string serialize(const Scene& scene, const AssetLibrary& library);
std::string serialize(const AssetLibrary& library);

/// FNV-1a over mesh geometry and asset identity only (no colors or scales).
std::uint64_t topology_hash(const AssetLibrary& library);
/// FNV-1a over base and accent colors only.
std::uint64_t color_hash(const AssetLibrary& library);

}  // namespace aerosynth
