#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "aerosynth/geometry.hpp"

namespace aerosynth {

enum class TrajectoryKind { circular, spiral, bird, flock_particle };

std::string_view to_string(TrajectoryKind kind);

/// Parametric flight path around `center`. Radius and altitude interpolate
/// linearly from their start to end values over the sequence duration; for
/// circular paths start and end coincide.
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::circular;
  Vec3 center;
  double radius_start = 10.0;
  double radius_end = 10.0;
  double altitude_start = 10.0;
  double altitude_end = 10.0;
  double angular_speed = 0.1;  ///< rad/s, sign gives turn direction
  double phase = 0.0;
  double bob_amplitude = 0.0;  ///< bird and flock kinds only
  double flap_frequency = 0.0;

  /// Checks the invariants; throws out_of_range on violation.
  void validate() const;
  bool operator==(const TrajectorySpec&) const = default;
};

/// Bank angle limit applied to bird and flock kinds.
inline constexpr double kMaxBankAngle = 30.0 * kPi / 180.0;
/// Roll per unit tangential speed (rad per m/s) before clamping.
inline constexpr double kBankGain = 0.05;

/// Pose along the path at time t of a sequence lasting `duration` seconds.
/// Throws out_of_range unless 0 <= t <= duration and duration > 0. The pose
/// scale is always 1; callers apply the instance scale.
Pose pose_at(const TrajectorySpec& spec, double t, double duration);

inline constexpr int kMinFlockSize = 10;
inline constexpr int kMaxFlockSize = 40;
/// Particles stay within this distance of the group position.
inline constexpr double kFlockRadius = 3.0;

/// Jittered per-particle paths following `group`. count must lie in
/// [kMinFlockSize, kMaxFlockSize].
std::vector<TrajectorySpec> spawn_flock(const TrajectorySpec& group, int count, std::uint64_t seed);

}  // namespace aerosynth
