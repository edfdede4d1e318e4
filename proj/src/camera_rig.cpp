#include "aerosynth/camera_rig.hpp"

#include <cmath>
#include <string>

#include "aerosynth/error.hpp"

namespace aerosynth {

CameraIntrinsics CameraIntrinsics::from_hfov(int width, int height, double hfov) {
  CameraIntrinsics k;
  k.width = width;
  k.height = height;
  k.cx = width / 2.0;
  k.cy = height / 2.0;
  k.focal_px = (width / 2.0) / std::tan(hfov / 2.0);
  return k;
}

double CameraIntrinsics::hfov() const { return 2.0 * std::atan((width / 2.0) / focal_px); }
double CameraIntrinsics::vfov() const { return 2.0 * std::atan((height / 2.0) / focal_px); }

CameraView::CameraView(const CameraIntrinsics& intrinsics, const CameraExtrinsics& extrinsics)
    : intrinsics_(intrinsics), extrinsics_(extrinsics) {
  const double ca = std::cos(extrinsics.azimuth), sa = std::sin(extrinsics.azimuth);
  const double ce = std::cos(extrinsics.elevation), se = std::sin(extrinsics.elevation);
  forward_ = {ce * ca, -ce * sa, se};
  right_ = {-sa, -ca, 0.0};
  down_ = cross(forward_, right_);
}

Vec3 CameraView::to_camera(const Vec3& world) const {
  const Vec3 d = world - extrinsics_.rig_position;
  return {dot(right_, d), dot(down_, d), dot(forward_, d)};
}

Vec3 CameraView::to_world(const Vec3& c) const {
  return extrinsics_.rig_position + right_ * c.x + down_ * c.y + forward_ * c.z;
}

Rig build_rig(int camera_count, double hfov, int width, int height, const Vec3& rig_position,
              double elevation) {
  if (!(hfov > 0.0 && hfov < kPi)) {
    throw Error(ErrorCode::invalid_fov, "hfov must lie in (0, pi), got " + std::to_string(hfov));
  }
  if (camera_count < 1 || width <= 0 || height <= 0) {
    throw Error(ErrorCode::invalid_fov, "rig needs at least one camera and a positive resolution");
  }
  Rig rig;
  rig.hfov = hfov;
  const auto intrinsics = CameraIntrinsics::from_hfov(width, height, hfov);
  for (int i = 0; i < camera_count; ++i) {
    CameraExtrinsics extrinsics;
    extrinsics.rig_position = rig_position;
    extrinsics.azimuth = i * (2.0 * kPi / camera_count);
    extrinsics.elevation = elevation;
    rig.cameras.emplace_back(intrinsics, extrinsics);
  }
  return rig;
}

std::optional<PixelCoord> project_camera_point(const CameraIntrinsics& k, const Vec3& p) {
  if (!(p.z > kNearPlane)) {
    return std::nullopt;
  }
  return PixelCoord{k.cx + k.focal_px * (p.x / p.z), k.cy + k.focal_px * (p.y / p.z)};
}

std::optional<PixelCoord> project(const CameraView& camera, const Vec3& world_point) {
  return project_camera_point(camera.intrinsics(), camera.to_camera(world_point));
}

Vec3 unproject(const CameraView& camera, double u, double v, double depth) {
  const auto& k = camera.intrinsics();
  return camera.to_world({(u - k.cx) * depth / k.focal_px, (v - k.cy) * depth / k.focal_px, depth});
}

}  // namespace aerosynth
