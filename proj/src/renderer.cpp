#include "aerosynth/renderer.hpp"

#include <algorithm>
#include <cmath>

#include "aerosynth/rng.hpp"

namespace aerosynth {
namespace {

constexpr double kHillDistance = 1500.0;
constexpr double kStructureMinDistance = 300.0;
constexpr double kStructureMaxDistance = 1200.0;
constexpr Rgb8 kFlockColor{48, 46, 50};

std::uint8_t to_channel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Rgb8 scale_color(Rgb8 c, double k) {
  return {to_channel(c.r * k), to_channel(c.g * k), to_channel(c.b * k)};
}

double lattice(std::uint64_t seed, std::int64_t i, std::int64_t j = 0) {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i) * 0x9e3779b1ULL +
                                                       static_cast<std::uint64_t>(j)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

/// Periodic 1-D value noise over `cells` lattice cells, x in cells.
double noise1(std::uint64_t seed, double x, std::int64_t cells) {
  const double fx = std::floor(x);
  const double t = smooth(x - fx);
  auto wrap = [&](std::int64_t i) { return ((i % cells) + cells) % cells; };
  const auto i = static_cast<std::int64_t>(fx);
  return std::lerp(lattice(seed, wrap(i)), lattice(seed, wrap(i + 1)), t);
}

double noise2(std::uint64_t seed, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
  const double tx = smooth(x - fx), ty = smooth(y - fy);
  const double a = std::lerp(lattice(seed, ix, iy), lattice(seed, ix + 1, iy), tx);
  const double b = std::lerp(lattice(seed, ix, iy + 1), lattice(seed, ix + 1, iy + 1), tx);
  return std::lerp(a, b, ty);
}

Vec3 sun_direction(const EnvironmentProfile& env) {
  const double ce = std::cos(env.sun_elevation);
  return {ce * std::cos(env.sun_azimuth), ce * std::sin(env.sun_azimuth),
          std::sin(env.sun_elevation)};
}

/// Flat shade: ambient floor plus Lambert term of the face turned toward the viewer.
Rgb8 shade(Rgb8 base, Vec3 normal, const Vec3& view_dir, const EnvironmentProfile& env) {
  if (dot(normal, view_dir) > 0.0) {
    normal = -normal;
  }
  const double lambert = std::max(0.0, dot(normal, sun_direction(env)));
  return scale_color(base, env.ambient_level + (1.0 - env.ambient_level) * lambert);
}

void draw_world_triangle(const std::array<Vec3, 3>& world, const CameraView& camera,
                         const EnvironmentProfile& env, Rgb8 base, std::uint32_t id,
                         FrameBundle& frame, std::size_t* written = nullptr) {
  const Vec3 n = normalized(cross(world[1] - world[0], world[2] - world[0]));
  if (n == Vec3{}) {
    return;
  }
  const Rgb8 color = shade(base, n, world[0] - camera.position(), env);
  const std::size_t w = draw_camera_triangle(
      {camera.to_camera(world[0]), camera.to_camera(world[1]), camera.to_camera(world[2])},
      camera.intrinsics(), id, color, frame);
  if (written) {
    *written += w;
  }
}

struct Building {
  Vec3 center;  // ground center
  double half_x, half_y, height, yaw;
  Rgb8 color;
};

std::vector<Building> layout_buildings(const EnvironmentProfile& env, std::uint64_t seed,
                                       const Vec3& origin) {
  Rng rng(seed, "structures");
  const double r0 = kStructureMinDistance / 1000.0, r1 = kStructureMaxDistance / 1000.0;
  const double area_km2 = kPi * (r1 * r1 - r0 * r0);
  const auto count = static_cast<int>(std::lround(env.structure_density * area_km2));
  std::vector<Building> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double az = rng.uniform(0.0, 2.0 * kPi);
    const double d = std::sqrt(rng.uniform(kStructureMinDistance * kStructureMinDistance,
                                           kStructureMaxDistance * kStructureMaxDistance));
    Building b;
    b.center = {origin.x + d * std::cos(az), origin.y + d * std::sin(az), 0.0};
    b.half_x = rng.uniform(8.0, 25.0);
    b.half_y = rng.uniform(8.0, 25.0);
    b.height = rng.uniform(env.structure_height_min, env.structure_height_max);
    b.yaw = rng.uniform(0.0, kPi);
    const double k = rng.uniform(0.8, 1.15);
    b.color = scale_color(env.structure_color, k);
    out.push_back(b);
  }
  return out;
}

void draw_building(const Building& b, const CameraView& camera, const EnvironmentProfile& env,
                   FrameBundle& frame) {
  const Mat3 rot = rotation_ypr(b.yaw, 0, 0);
  std::array<Vec3, 8> p;
  const std::array<Vec3, 4> ring{Vec3{-b.half_x, -b.half_y, 0}, Vec3{b.half_x, -b.half_y, 0},
                                 Vec3{b.half_x, b.half_y, 0}, Vec3{-b.half_x, b.half_y, 0}};
  for (int i = 0; i < 4; ++i) {
    p[i] = b.center + rot * ring[i];
    p[i + 4] = p[i] + Vec3{0, 0, b.height};
  }
  // Roof and four walls; the floor is never visible from the rig height.
  draw_world_triangle({p[4], p[5], p[6]}, camera, env, b.color, 0, frame);
  draw_world_triangle({p[4], p[6], p[7]}, camera, env, b.color, 0, frame);
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    draw_world_triangle({p[i], p[j], p[j + 4]}, camera, env, b.color, 0, frame);
    draw_world_triangle({p[i], p[j + 4], p[i + 4]}, camera, env, b.color, 0, frame);
  }
}

}  // namespace

FrameBundle generate_background(const EnvironmentProfile& env, const CameraView& camera,
                                std::uint64_t seed, BackgroundStats* stats) {
  const int width = camera.width(), height = camera.height();
  FrameBundle frame(width, height);
  const auto& k = camera.intrinsics();
  const Vec3 origin = camera.position();
  const double cam_z = origin.z;
  const std::uint64_t hill_seed = stream_seed(seed, "hills");
  const std::uint64_t ground_seed = stream_seed(seed, "ground");
  const auto hill_cells =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(env.terrain_frequency * 2.0 * kPi)));
  const double max_hill_slope = (env.terrain_amplitude - cam_z) / kHillDistance;
  const double ground_light =
      env.ambient_level + (1.0 - env.ambient_level) * std::max(0.0, std::sin(env.sun_elevation));

  // Rows above the horizon get a screen-space sky gradient starting at the top color.
  const double horizon_v =
      k.cy + k.focal_px * std::tan(camera.extrinsics().elevation);

  for (int y = 0; y < height; ++y) {
    const double t = horizon_v > 0.0 ? std::clamp(y / horizon_v, 0.0, 1.0) : 1.0;
    const Rgb8 sky{to_channel(env.sky_top.r + (env.sky_horizon.r - env.sky_top.r) * t),
                   to_channel(env.sky_top.g + (env.sky_horizon.g - env.sky_top.g) * t),
                   to_channel(env.sky_top.b + (env.sky_horizon.b - env.sky_top.b) * t)};
    auto rgb_row = frame.rgb.row(y);
    auto depth_row = frame.depth.row(y);
    const double cy = (y + 0.5 - k.cy) / k.focal_px;
    for (int x = 0; x < width; ++x) {
      const double cx = (x + 0.5 - k.cx) / k.focal_px;
      // World ray with unit camera-space depth, so a hit at parameter s has depth s.
      const Vec3 d = camera.right() * cx + camera.down() * cy + camera.forward();
      const double horizontal = std::sqrt(d.x * d.x + d.y * d.y);
      rgb_row[x] = sky;

      if (d.z < 0.0) {
        const double s = cam_z / -d.z;
        if (s * horizontal < kHillDistance) {
          const double gx = origin.x + s * d.x, gy = origin.y + s * d.y;
          const double tex = 0.85 + 0.15 * noise2(ground_seed, gx / 6.0, gy / 6.0);
          rgb_row[x] = scale_color(env.ground_color, ground_light * tex);
          depth_row[x] = static_cast<float>(s);
          continue;
        }
      }
      if (horizontal <= 0.0 || d.z / horizontal > max_hill_slope) {
        continue;
      }
      double theta = std::atan2(d.y, d.x);
      if (theta < 0.0) {
        theta += 2.0 * kPi;
      }
      const double hill = env.terrain_amplitude *
                          (0.55 + 0.45 * noise1(hill_seed, theta * env.terrain_frequency, hill_cells));
      const double s = kHillDistance / horizontal;
      const double z_at = cam_z + s * d.z;
      if (z_at < hill) {
        const double shade_k = ground_light * (0.8 + 0.2 * (z_at / std::max(hill, 1e-6)));
        rgb_row[x] = scale_color(env.terrain_color, shade_k);
        depth_row[x] = static_cast<float>(s);
      }
    }
  }

  Image<float> before;
  if (stats) {
    before = frame.depth;
  }
  const double cull = k.hfov() / 2.0 + 0.2;
  for (const auto& b : layout_buildings(env, seed, origin)) {
    const Vec3 to = b.center - origin;
    const double along = dot(Vec3{to.x, to.y, 0}, normalized(Vec3{camera.forward().x, camera.forward().y, 0}));
    const double angle = std::acos(std::clamp(along / std::max(norm(Vec3{to.x, to.y, 0}), 1e-9), -1.0, 1.0));
    const double half_width = std::atan((b.half_x + b.half_y) / std::max(norm(to), 1.0));
    if (angle - half_width > cull) {
      continue;
    }
    draw_building(b, camera, env, frame);
  }
  if (stats) {
    stats->structure_pixels = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (frame.depth.pixels()[i] != before.pixels()[i]) {
        ++stats->structure_pixels;
      }
    }
  }
  return frame;
}

FrameBundle render_frame(const Scene& scene, const CameraView& camera, const AssetLibrary& library,
                         RenderStats* stats) {
  FrameBundle frame = generate_background(scene.environment, camera, scene.seed);
  const EnvironmentProfile& env = scene.environment;

  for (const auto& inst : scene.instances) {
    if (inst.is_flock_particle()) {
      continue;
    }
    const AssetModel& asset = library.at(*inst.asset_index);
    const Mat3 rot = inst.pose.rotation();
    const std::uint32_t id = inst.annotatable ? inst.instance_id : 0u;
    for (const auto& tri : asset.mesh) {
      const Rgb8 base = tri.material == Material::base ? asset.base_color : asset.accent_color;
      const std::array<Vec3, 3> world{inst.pose.position + rot * (tri.a * inst.pose.scale),
                                      inst.pose.position + rot * (tri.b * inst.pose.scale),
                                      inst.pose.position + rot * (tri.c * inst.pose.scale)};
      draw_world_triangle(world, camera, env, base, id, frame);
    }
  }

  // Billboarded particles facing the camera; drawn last so pixel counts are final.
  RenderStats local;
  const Rgb8 particle_color = scale_color(kFlockColor, 0.6 + 0.4 * env.ambient_level);
  for (const auto& inst : scene.instances) {
    if (!inst.is_flock_particle()) {
      continue;
    }
    const Vec3 c = camera.to_camera(inst.pose.position);
    const double s = inst.pose.scale;
    const std::array<Vec3, 3> tri{c + Vec3{-0.5 * s, -0.15 * s, 0}, c + Vec3{0.5 * s, -0.15 * s, 0},
                                  c + Vec3{0, 0.3 * s, 0}};
    const std::size_t w = draw_camera_triangle(tri, camera.intrinsics(), 0u, particle_color, frame);
    if (w > 0) {
      ++local.flock_particles_drawn;
      local.flock_pixels += w;
    }
  }
  if (stats) {
    *stats = local;
  }
  return frame;
}

}  // namespace aerosynth
