#include "aerosynth/weather.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aerosynth/error.hpp"
#include "aerosynth/rng.hpp"

namespace aerosynth {
namespace {

void check_severity(double severity) {
  if (!(severity >= 0.0 && severity <= 1.0)) {
    throw Error(ErrorCode::severity_range,
                "severity " + std::to_string(severity) + " outside [0, 1]");
  }
}

std::uint8_t to_channel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

std::size_t SnowModel::streak_count(double severity, int width, int height) const {
  const double megapixels = static_cast<double>(width) * height / 1.0e6;
  return static_cast<std::size_t>(std::llround(streaks_per_megapixel * severity * megapixels));
}

FrameBundle apply_fog(const FrameBundle& frame, double severity, const FogModel& model) {
  check_severity(severity);
  FrameBundle out = frame;
  const double beta = model.beta(severity);
  if (beta == 0.0) {
    return out;
  }
  const auto depth = frame.depth.pixels();
  auto rgb = out.rgb.pixels();
  const Rgb8 fog = model.fog_color;
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    const double d = std::min(static_cast<double>(depth[i]), model.max_distance);
    const double t = std::exp(-beta * d);
    const Rgb8 c = rgb[i];
    rgb[i] = {to_channel(c.r * t + fog.r * (1.0 - t)), to_channel(c.g * t + fog.g * (1.0 - t)),
              to_channel(c.b * t + fog.b * (1.0 - t))};
  }
  return out;
}

FrameBundle apply_snow(const FrameBundle& frame, double severity, std::uint64_t seed,
                       const SnowModel& model) {
  check_severity(severity);
  FrameBundle out = frame;
  if (severity == 0.0) {
    return out;
  }
  const double keep = 1.0 - model.contrast_loss * severity;
  for (auto& c : out.rgb.pixels()) {
    c = {to_channel(127.5 + (c.r - 127.5) * keep), to_channel(127.5 + (c.g - 127.5) * keep),
         to_channel(127.5 + (c.b - 127.5) * keep)};
  }

  const int width = frame.width(), height = frame.height();
  Image<std::uint8_t> covered(width, height, 0);
  Rng rng(seed, "snow");
  const std::size_t count = model.streak_count(severity, width, height);
  for (std::size_t n = 0; n < count; ++n) {
    const double x0 = rng.uniform(0.0, width);
    const double y0 = rng.uniform(0.0, height);
    const int length = rng.range(model.streak_min_px, model.streak_max_px);
    const double angle = rng.uniform(-model.angle_jitter, model.angle_jitter);
    const double dx = std::sin(angle), dy = std::cos(angle);
    for (int s = 0; s < length; ++s) {
      const int x = static_cast<int>(std::floor(x0 + dx * s));
      const int y = static_cast<int>(std::floor(y0 + dy * s));
      if (covered.contains(x, y)) {
        covered.at(x, y) = 1;
      }
    }
  }
  // Each covered pixel is blended once, however many streaks cross it.
  const double a = model.opacity;
  const Rgb8 f = model.flake_color;
  auto rgb = out.rgb.pixels();
  const auto mask = covered.pixels();
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    if (mask[i]) {
      const Rgb8 c = rgb[i];
      rgb[i] = {to_channel(c.r * (1 - a) + f.r * a), to_channel(c.g * (1 - a) + f.g * a),
                to_channel(c.b * (1 - a) + f.b * a)};
    }
  }
  return out;
}

FrameBundle apply_weather(const FrameBundle& frame, const WeatherParams& weather,
                          std::uint64_t seed) {
  weather.validate();
  switch (weather.condition) {
    case WeatherCondition::clear: return frame;
    case WeatherCondition::fog: return apply_fog(frame, weather.severity);
    case WeatherCondition::snow: return apply_snow(frame, weather.severity, seed);
    case WeatherCondition::other:
      return apply_snow(apply_fog(frame, weather.severity), weather.snow_severity, seed);
  }
  return frame;
}

}  // namespace aerosynth
