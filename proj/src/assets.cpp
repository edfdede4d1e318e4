// Procedural drone and bird meshes built from boxes, cylinders and slabs.

#include <algorithm>
#include <array>
#include <cmath>

#include "aerosynth/rng.hpp"
#include "aerosynth/scene_model.hpp"

namespace aerosynth {
namespace {

const Mat3 kIdentity{};

void add_quad(Mesh& mesh, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
              Material material) {
  mesh.push_back({a, b, c, material});
  mesh.push_back({a, c, d, material});
}

/// Closed hexahedron from 8 corners: 0-3 bottom face, 4-7 top face, same order.
void add_hexahedron(Mesh& mesh, const std::array<Vec3, 8>& p, Material material) {
  add_quad(mesh, p[0], p[3], p[2], p[1], material);  // bottom
  add_quad(mesh, p[4], p[5], p[6], p[7], material);  // top
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    add_quad(mesh, p[i], p[j], p[j + 4], p[i + 4], material);
  }
}

void add_box(Mesh& mesh, const Vec3& center, const Vec3& half, Material material,
             const Mat3& rotation = kIdentity) {
  std::array<Vec3, 8> p;
  const std::array<Vec3, 4> ring{Vec3{-half.x, -half.y, 0}, Vec3{half.x, -half.y, 0},
                                 Vec3{half.x, half.y, 0}, Vec3{-half.x, half.y, 0}};
  for (int i = 0; i < 4; ++i) {
    p[i] = center + rotation * (ring[i] + Vec3{0, 0, -half.z});
    p[i + 4] = center + rotation * (ring[i] + Vec3{0, 0, half.z});
  }
  add_hexahedron(mesh, p, material);
}

/// Closed cylinder along the rotated +z axis.
void add_cylinder(Mesh& mesh, const Vec3& center, double radius, double half_height, int segments,
                  Material material, const Mat3& rotation = kIdentity) {
  const Vec3 top = center + rotation * Vec3{0, 0, half_height};
  const Vec3 bottom = center + rotation * Vec3{0, 0, -half_height};
  for (int i = 0; i < segments; ++i) {
    const double a0 = 2.0 * kPi * i / segments;
    const double a1 = 2.0 * kPi * (i + 1) / segments;
    const Vec3 r0{radius * std::cos(a0), radius * std::sin(a0), 0};
    const Vec3 r1{radius * std::cos(a1), radius * std::sin(a1), 0};
    const Vec3 b0 = bottom + rotation * r0, b1 = bottom + rotation * r1;
    const Vec3 t0 = top + rotation * r0, t1 = top + rotation * r1;
    add_quad(mesh, b0, b1, t1, t0, material);
    mesh.push_back({top, t0, t1, material});
    mesh.push_back({bottom, b1, b0, material});
  }
}

/// Flat slab (wing, tail) from a planform quad, extruded along z by `thickness`.
void add_slab(Mesh& mesh, const std::array<Vec3, 4>& outline, double thickness, Material material) {
  std::array<Vec3, 8> p;
  for (int i = 0; i < 4; ++i) {
    p[i] = outline[i] - Vec3{0, 0, thickness / 2};
    p[i + 4] = outline[i] + Vec3{0, 0, thickness / 2};
  }
  add_hexahedron(mesh, p, material);
}

struct DroneDesign {
  const char* id;
  int arms;
  double arm_length;
  double body_half;
  PayloadKind payload;
  bool gimbal_camera;
};

// 7 payload-free airframes followed by 8 payload carriers.
constexpr std::array<DroneDesign, kDroneAssetCount> kDroneDesigns{{
    {"drone_quad_compact", 4, 0.18, 0.06, PayloadKind::none, true},
    {"drone_quad_standard", 4, 0.25, 0.08, PayloadKind::none, true},
    {"drone_quad_survey", 4, 0.32, 0.09, PayloadKind::none, true},
    {"drone_quad_racer", 4, 0.14, 0.05, PayloadKind::none, false},
    {"drone_hex_standard", 6, 0.40, 0.11, PayloadKind::none, true},
    {"drone_hex_heavy", 6, 0.55, 0.14, PayloadKind::none, true},
    {"drone_octo_cinema", 8, 0.50, 0.13, PayloadKind::none, true},
    {"drone_quad_box", 4, 0.30, 0.09, PayloadKind::box, false},
    {"drone_quad_bag", 4, 0.30, 0.09, PayloadKind::bag, false},
    {"drone_hex_box", 6, 0.45, 0.12, PayloadKind::box, false},
    {"drone_hex_gun", 6, 0.45, 0.12, PayloadKind::gun, false},
    {"drone_octo_spray", 8, 0.60, 0.15, PayloadKind::spray_kit, false},
    {"drone_quad_gun", 4, 0.35, 0.10, PayloadKind::gun, false},
    {"drone_hex_bag", 6, 0.40, 0.11, PayloadKind::bag, false},
    {"drone_octo_box", 8, 0.55, 0.14, PayloadKind::box, false},
}};

Mesh build_drone_mesh(const DroneDesign& d) {
  Mesh mesh;
  const double body_h = d.body_half * 0.45;
  add_box(mesh, {0, 0, 0}, {d.body_half, d.body_half * 0.8, body_h}, Material::base);

  const double rotor_radius = d.arm_length * std::sin(kPi / d.arms) * 0.85;
  for (int k = 0; k < d.arms; ++k) {
    const double angle = 2.0 * kPi * k / d.arms + kPi / d.arms;
    const Mat3 yaw = rotation_ypr(angle, 0, 0);
    const Vec3 dir = yaw * Vec3{1, 0, 0};
    add_box(mesh, dir * (d.arm_length / 2), {d.arm_length / 2, 0.012, 0.01}, Material::base, yaw);
    const Vec3 tip = dir * d.arm_length;
    add_cylinder(mesh, tip + Vec3{0, 0, 0.015}, 0.022, 0.02, 8, Material::accent);
    add_cylinder(mesh, tip + Vec3{0, 0, 0.04}, rotor_radius, 0.003, 12, Material::accent);
  }

  // Landing skids.
  for (double side : {-1.0, 1.0}) {
    add_box(mesh, {0, side * d.body_half * 0.7, -body_h - 0.04}, {0.006, 0.006, 0.04},
            Material::accent);
    add_box(mesh, {0, side * d.body_half * 0.7, -body_h - 0.085},
            {d.body_half * 1.1, 0.008, 0.006}, Material::accent);
  }
  if (d.gimbal_camera) {
    add_box(mesh, {d.body_half * 0.8, 0, -body_h - 0.02}, {0.025, 0.025, 0.025}, Material::accent);
  }

  const double s = d.arm_length / 0.3;
  const double hang = -body_h - 0.1 * s;
  switch (d.payload) {
    case PayloadKind::none:
      break;
    case PayloadKind::box:
      add_box(mesh, {0, 0, hang - 0.02}, {0.12 * s, 0.1 * s, 0.08 * s}, Material::accent);
      break;
    case PayloadKind::bag:
      add_box(mesh, {0, 0, -body_h - 0.04 * s}, {0.005, 0.005, 0.04 * s}, Material::accent);
      add_cylinder(mesh, {0, 0, hang - 0.06 * s}, 0.09 * s, 0.1 * s, 10, Material::accent);
      break;
    case PayloadKind::gun: {
      add_box(mesh, {0.05 * s, 0, hang}, {0.1 * s, 0.03 * s, 0.035 * s}, Material::accent);
      add_box(mesh, {0.3 * s, 0, hang + 0.01 * s}, {0.16 * s, 0.012 * s, 0.012 * s},
              Material::accent);
      add_box(mesh, {-0.12 * s, 0, hang - 0.01 * s}, {0.08 * s, 0.02 * s, 0.04 * s},
              Material::accent);
      add_box(mesh, {0.02 * s, 0, hang - 0.07 * s}, {0.015 * s, 0.015 * s, 0.04 * s},
              Material::accent);
      break;
    }
    case PayloadKind::spray_kit: {
      const Mat3 lying = rotation_ypr(0, kPi / 2, 0);
      add_cylinder(mesh, {0, 0, hang}, 0.08 * s, 0.15 * s, 10, Material::accent, lying);
      add_box(mesh, {0, 0, hang - 0.1 * s}, {0.01, d.arm_length * 0.8, 0.008}, Material::accent);
      for (double side : {-1.0, 1.0}) {
        add_box(mesh, {0, side * d.arm_length * 0.75, hang - 0.12 * s}, {0.01, 0.01, 0.02},
                Material::accent);
      }
      break;
    }
  }
  return mesh;
}

struct BirdDesign {
  const char* id;
  double body_length;
  double wingspan;
  double chord;
  double dihedral;  ///< rad, positive raises the wingtips
  double sweep;     ///< tip offset backwards as a fraction of the half span
  double neck;      ///< extra head offset, fraction of body length
};

constexpr std::array<BirdDesign, kBirdAssetCount> kBirdDesigns{{
    {"bird_sparrow", 0.15, 0.25, 0.06, 0.15, 0.2, 0.0},
    {"bird_swallow", 0.17, 0.34, 0.06, 0.05, 0.7, 0.0},
    {"bird_pigeon", 0.32, 0.65, 0.12, 0.2, 0.25, 0.05},
    {"bird_crow", 0.45, 0.95, 0.17, 0.1, 0.15, 0.05},
    {"bird_gull", 0.5, 1.3, 0.16, 0.25, 0.35, 0.05},
    {"bird_hawk", 0.55, 1.2, 0.25, 0.1, 0.1, 0.03},
    {"bird_heron", 0.9, 1.8, 0.3, -0.05, 0.2, 0.35},
    {"bird_eagle", 0.85, 2.0, 0.38, 0.12, 0.1, 0.05},
}};

Mesh build_bird_mesh(const BirdDesign& b) {
  Mesh mesh;
  const double L = b.body_length;
  const double body_w = L * 0.12;
  const double body_h = L * 0.1;
  add_box(mesh, {0, 0, 0}, {L * 0.5, body_w, body_h}, Material::base);
  // Head and beak.
  const double head_x = L * (0.55 + b.neck);
  if (b.neck > 0.1) {
    add_box(mesh, {L * (0.5 + b.neck / 2), 0, body_h * 0.5}, {L * b.neck / 2, body_w * 0.3,
                                                              body_h * 0.3}, Material::base);
  }
  add_box(mesh, {head_x, 0, body_h * 0.6}, {L * 0.08, body_w * 0.7, body_h * 0.7}, Material::base);
  add_box(mesh, {head_x + L * 0.12, 0, body_h * 0.5}, {L * 0.05, body_w * 0.2, body_h * 0.15},
          Material::accent);

  const double half_span = b.wingspan / 2;
  const double tip_z = (half_span - body_w) * std::tan(b.dihedral);
  const double tip_back = b.sweep * half_span;
  for (double side : {-1.0, 1.0}) {
    const double root_y = side * body_w;
    const double tip_y = side * half_span;
    const std::array<Vec3, 4> wing{Vec3{b.chord * 0.6, root_y, body_h * 0.5},
                                   Vec3{b.chord * 0.6 - tip_back, tip_y, body_h * 0.5 + tip_z},
                                   Vec3{b.chord * 0.6 - tip_back - b.chord * 0.5, tip_y,
                                        body_h * 0.5 + tip_z},
                                   Vec3{-b.chord * 0.4, root_y, body_h * 0.5}};
    add_slab(mesh, wing, 0.01 + L * 0.01, Material::accent);
  }
  // Tail fan.
  const std::array<Vec3, 4> tail{Vec3{-L * 0.45, -body_w * 0.6, 0}, Vec3{-L * 0.45, body_w * 0.6, 0},
                                 Vec3{-L * 0.8, body_w * 1.5, 0}, Vec3{-L * 0.8, -body_w * 1.5, 0}};
  add_slab(mesh, tail, 0.008, Material::accent);
  return mesh;
}

Rgb8 jitter_color(Rng& rng, Rgb8 c, int amount) {
  auto j = [&](std::uint8_t v) {
    return static_cast<std::uint8_t>(std::clamp(v + rng.range(-amount, amount), 0, 255));
  };
  return {j(c.r), j(c.g), j(c.b)};
}

constexpr std::array<Rgb8, 6> kDronePalette{{{40, 40, 44},
                                              {225, 225, 228},
                                              {20, 20, 22},
                                              {180, 40, 35},
                                              {210, 170, 40},
                                              {110, 115, 120}}};
constexpr std::array<Rgb8, 6> kBirdPalette{{{95, 75, 55},
                                             {130, 130, 135},
                                             {30, 30, 32},
                                             {220, 220, 215},
                                             {150, 110, 70},
                                             {70, 65, 60}}};

}  // namespace

AssetLibrary build_asset_library(std::uint64_t seed) {
  Rng color_rng(seed, "color");
  Rng scale_rng(seed, "scale");
  AssetLibrary library;
  library.reserve(kDroneAssetCount + kBirdAssetCount);

  for (const auto& design : kDroneDesigns) {
    AssetModel asset;
    asset.asset_id = design.id;
    asset.cls = ClassId::drone;
    asset.payload = design.payload;
    asset.mesh = build_drone_mesh(design);
    asset.base_color = jitter_color(
        color_rng, kDronePalette[color_rng.below(kDronePalette.size())], 18);
    asset.accent_color = jitter_color(
        color_rng, kDronePalette[color_rng.below(kDronePalette.size())], 18);
    asset.scale_range = {scale_rng.uniform(0.8, 0.95), scale_rng.uniform(1.05, 1.25)};
    library.push_back(std::move(asset));
  }
  for (const auto& design : kBirdDesigns) {
    AssetModel asset;
    asset.asset_id = design.id;
    asset.cls = ClassId::bird;
    asset.payload = PayloadKind::none;
    asset.mesh = build_bird_mesh(design);
    asset.base_color =
        jitter_color(color_rng, kBirdPalette[color_rng.below(kBirdPalette.size())], 15);
    asset.accent_color =
        jitter_color(color_rng, kBirdPalette[color_rng.below(kBirdPalette.size())], 15);
    asset.scale_range = {scale_rng.uniform(0.85, 0.95), scale_rng.uniform(1.05, 1.15)};
    library.push_back(std::move(asset));
  }
  return library;
}

}  // namespace aerosynth
