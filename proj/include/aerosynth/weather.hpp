#pragma once

#include <cstdint>

#include "aerosynth/renderer.hpp"
#include "aerosynth/scene_model.hpp"

namespace aerosynth {

/// Depth-aware fog: rgb' = rgb * T + fog_color * (1 - T) with transmittance
/// T = exp(-beta * min(depth, max_distance)) and beta = beta_max * severity.
struct FogModel {
  Rgb8 fog_color{200, 200, 210};
  double beta_max = 0.01;  ///< 1/m at severity 1
  double max_distance = 2000.0;

  double beta(double severity) const { return beta_max * severity; }
};

/// Screen-space snow: contrast loss toward mid-gray plus short near-white streaks.
struct SnowModel {
  double streaks_per_megapixel = 5000.0;  ///< at severity 1
  int streak_min_px = 3;
  int streak_max_px = 9;
  double angle_jitter = 0.3;  ///< rad around vertical
  Rgb8 flake_color{245, 246, 250};
  double opacity = 0.8;
  double contrast_loss = 0.15;  ///< at severity 1

  /// Streak count for a frame: round(density * severity * megapixels).
  std::size_t streak_count(double severity, int width, int height) const;
};

/// Only rgb changes; segmap and depth are copied through untouched.
/// Throws severity_range unless severity is in [0, 1].
FrameBundle apply_fog(const FrameBundle& frame, double severity, const FogModel& model = {});

/// Only rgb changes. The streak sequence is a fixed function of the seed and a
/// higher severity draws a longer prefix of it, so coverage grows with severity.
FrameBundle apply_snow(const FrameBundle& frame, double severity, std::uint64_t seed,
                       const SnowModel& model = {});

/// Dispatches on the condition; `other` applies fog at `severity` then snow at
/// `snow_severity`.
FrameBundle apply_weather(const FrameBundle& frame, const WeatherParams& weather,
                          std::uint64_t seed);

}  // namespace aerosynth
