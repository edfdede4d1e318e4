#pragma once

#include <array>
#include <cstdint>

#include "aerosynth/camera_rig.hpp"
#include "aerosynth/image.hpp"
#include "aerosynth/scene_model.hpp"

namespace aerosynth {

/// Depth of pixels that see only sky.
inline constexpr float kFarDepth = 1.0e6f;

/// Co-registered buffers of one camera view.
struct FrameBundle {
  Image<Rgb8> rgb;
  Image<std::uint32_t> segmap;  ///< instance ids, 0 = background
  Image<float> depth;           ///< camera-space z in meters

  FrameBundle() = default;
  FrameBundle(int width, int height)
      : rgb(width, height), segmap(width, height, 0u), depth(width, height, kFarDepth) {}

  int width() const { return rgb.width(); }
  int height() const { return rgb.height(); }
  bool operator==(const FrameBundle&) const = default;
};

/// Screen-space vertex: pixel coordinates plus camera-space depth (> 0).
struct ScreenVertex {
  double x = 0.0;
  double y = 0.0;
  double depth = 1.0;
};

/// Vertex positions snap to 1/kSubpixelSteps of a pixel before coverage tests.
inline constexpr std::int64_t kSubpixelSteps = 256;

/// Coverage and z-test of one triangle. A pixel is covered when its center lies
/// inside the snapped triangle under the top-left rule; it is written when the
/// perspective-correct depth is strictly less than the stored depth. Writes rgb,
/// segmap (= instance_id) and depth together. Returns the number of pixels written.
std::size_t rasterize_triangle(const std::array<ScreenVertex, 3>& tri, std::uint32_t instance_id,
                               Rgb8 color, FrameBundle& frame);

struct BackgroundStats {
  std::size_t structure_pixels = 0;  ///< pixels whose final surface is a building
};

/// Sky gradient, ground, hill ring and box skyline for one camera. The world
/// layout depends only on (environment, seed), so all rig cameras agree.
FrameBundle generate_background(const EnvironmentProfile& environment, const CameraView& camera,
                                std::uint64_t seed, BackgroundStats* stats = nullptr);

struct RenderStats {
  std::size_t flock_particles_drawn = 0;  ///< particles that reached at least one pixel
  std::size_t flock_pixels = 0;
};

/// Background plus every instance of the scene, flat shaded under the scene's sun.
/// Flock particles are drawn last and leave segmap at 0.
FrameBundle render_frame(const Scene& scene, const CameraView& camera,
                         const AssetLibrary& library, RenderStats* stats = nullptr);

/// Camera-space triangle clipped against the near plane and a guard band, then
/// projected and rasterized. Returns pixels written.
std::size_t draw_camera_triangle(const std::array<Vec3, 3>& camera_tri,
                                 const CameraIntrinsics& intrinsics, std::uint32_t instance_id,
                                 Rgb8 color, FrameBundle& frame);

}  // namespace aerosynth
