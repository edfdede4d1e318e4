#include "aerosynth/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aerosynth/error.hpp"
#include "aerosynth/rng.hpp"

namespace aerosynth {

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::circular: return "circular";
    case TrajectoryKind::spiral: return "spiral";
    case TrajectoryKind::bird: return "bird";
    case TrajectoryKind::flock_particle: return "flock_particle";
  }
  return "unknown";
}

void TrajectorySpec::validate() const {
  if (!(radius_start > 0.0 && radius_end > 0.0)) {
    throw Error(ErrorCode::out_of_range, "trajectory radius must be positive");
  }
  if (angular_speed == 0.0 || !std::isfinite(angular_speed)) {
    throw Error(ErrorCode::out_of_range, "trajectory angular speed must be nonzero");
  }
  if (kind == TrajectoryKind::circular &&
      (radius_start != radius_end || altitude_start != altitude_end)) {
    throw Error(ErrorCode::out_of_range, "circular trajectory must keep radius and altitude");
  }
}

Pose pose_at(const TrajectorySpec& spec, double t, double duration) {
  if (!(duration > 0.0) || !(t >= 0.0 && t <= duration)) {
    throw Error(ErrorCode::out_of_range, "time " + std::to_string(t) + " outside [0, " +
                                             std::to_string(duration) + "]");
  }
  const double s = t / duration;
  const double radius = std::lerp(spec.radius_start, spec.radius_end, s);
  const double altitude = std::lerp(spec.altitude_start, spec.altitude_end, s);
  const double theta = spec.angular_speed * t + spec.phase;

  Pose pose;
  pose.position = spec.center + Vec3{radius * std::cos(theta), radius * std::sin(theta), altitude};
  const double direction = spec.angular_speed > 0.0 ? 1.0 : -1.0;
  pose.yaw = theta + direction * kPi / 2.0;

  if (spec.kind == TrajectoryKind::bird || spec.kind == TrajectoryKind::flock_particle) {
    pose.position.z += spec.bob_amplitude * std::sin(2.0 * kPi * spec.flap_frequency * t);
    pose.roll = std::clamp(kBankGain * spec.angular_speed * radius, -kMaxBankAngle, kMaxBankAngle);
  }
  return pose;
}

std::vector<TrajectorySpec> spawn_flock(const TrajectorySpec& group, int count, std::uint64_t seed) {
  if (count < kMinFlockSize || count > kMaxFlockSize) {
    throw Error(ErrorCode::out_of_range, "flock size " + std::to_string(count) + " outside [" +
                                             std::to_string(kMinFlockSize) + ", " +
                                             std::to_string(kMaxFlockSize) + "]");
  }
  Rng rng(seed, "flock");
  // Offsets of at most 2 m plus a phase lead of at most 0.5 m of arc keep every
  // particle inside kFlockRadius of the group position at all times.
  const double max_radius = std::max(group.radius_start, group.radius_end);
  std::vector<TrajectorySpec> particles;
  particles.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vec3 offset;
    do {
      offset = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    } while (dot(offset, offset) > 1.0);
    TrajectorySpec p = group;
    p.kind = TrajectoryKind::flock_particle;
    p.center = group.center + offset * 2.0;
    p.phase = group.phase + rng.uniform(-0.5, 0.5) / max_radius;
    particles.push_back(p);
  }
  return particles;
}

}  // namespace aerosynth
