#pragma once

#include <optional>
#include <vector>

#include "aerosynth/geometry.hpp"

namespace aerosynth {

/// Minimum camera-space depth a point needs to be projectable.
inline constexpr double kNearPlane = 0.01;

struct CameraIntrinsics {
  int width = 0;
  int height = 0;
  double focal_px = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  /// Square pixels, principal point at the image center.
  static CameraIntrinsics from_hfov(int width, int height, double hfov);

  double hfov() const;
  double vfov() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

struct CameraExtrinsics {
  Vec3 rig_position;
  double azimuth = 0.0;  ///< clockwise seen from above, 0 looks along world +x
  double elevation = 0.0;
  bool operator==(const CameraExtrinsics&) const = default;
};

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

/// One pinhole camera of the rig. Camera frame: +x right, +y down, +z forward;
/// the right axis always stays horizontal (zero roll).
class CameraView {
 public:
  CameraView() = default;
  CameraView(const CameraIntrinsics& intrinsics, const CameraExtrinsics& extrinsics);

  const CameraIntrinsics& intrinsics() const { return intrinsics_; }
  const CameraExtrinsics& extrinsics() const { return extrinsics_; }
  int width() const { return intrinsics_.width; }
  int height() const { return intrinsics_.height; }

  const Vec3& forward() const { return forward_; }
  const Vec3& right() const { return right_; }
  const Vec3& down() const { return down_; }
  const Vec3& position() const { return extrinsics_.rig_position; }

  Vec3 to_camera(const Vec3& world) const;
  Vec3 to_world(const Vec3& camera) const;

 private:
  CameraIntrinsics intrinsics_;
  CameraExtrinsics extrinsics_;
  Vec3 forward_{1, 0, 0};
  Vec3 right_{0, -1, 0};
  Vec3 down_{0, 0, -1};
};

struct Rig {
  std::vector<CameraView> cameras;
  double hfov = 0.0;

  std::size_t size() const { return cameras.size(); }
  const CameraView& operator[](std::size_t i) const { return cameras[i]; }
};

/// Camera i looks at azimuth i * 2pi / camera_count. Throws invalid_fov unless
/// 0 < hfov < pi.
Rig build_rig(int camera_count, double hfov, int width, int height, const Vec3& rig_position,
              double elevation = 0.0);

/// Pinhole projection of a camera-frame point; nullopt when z <= kNearPlane.
std::optional<PixelCoord> project_camera_point(const CameraIntrinsics& intrinsics,
                                               const Vec3& camera_point);

/// World point to sub-pixel image coordinates; nullopt means the point is behind
/// the camera (within the near plane). Coordinates outside the image are returned
/// as-is.
std::optional<PixelCoord> project(const CameraView& camera, const Vec3& world_point);

/// World point at camera-space depth `depth` behind pixel (u, v).
Vec3 unproject(const CameraView& camera, double u, double v, double depth);

}  // namespace aerosynth
