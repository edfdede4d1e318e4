#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace aerosynth {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return n > 0.0 ? v / n : Vec3{};
}
inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  constexpr Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  constexpr Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        r.m[i * 3 + j] =
            m[i * 3] * o.m[j] + m[i * 3 + 1] * o.m[3 + j] + m[i * 3 + 2] * o.m[6 + j];
      }
    }
    return r;
  }
};

/// Body-to-world rotation: yaw about +z, then pitch about +y, then roll about +x
/// (R = Rz(yaw) * Ry(pitch) * Rx(roll)).
inline Mat3 rotation_ypr(double yaw, double pitch, double roll) {
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);
  Mat3 rz{{cy, -sy, 0, sy, cy, 0, 0, 0, 1}};
  Mat3 ry{{cp, 0, sp, 0, 1, 0, -sp, 0, cp}};
  Mat3 rx{{1, 0, 0, 0, cr, -sr, 0, sr, cr}};
  return rz * ry * rx;
}

struct Pose {
  Vec3 position;
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
  double scale = 1.0;

  Mat3 rotation() const { return rotation_ypr(yaw, pitch, roll); }
  Vec3 apply(const Vec3& model_point) const {
    return position + rotation() * (model_point * scale);
  }
  bool valid() const {
    return scale > 0.0 && std::isfinite(scale) && is_finite(position) && std::isfinite(yaw) &&
           std::isfinite(pitch) && std::isfinite(roll);
  }
  bool operator==(const Pose&) const = default;
};

/// Material slot of a mesh triangle: 0 takes the asset's base color, 1 its accent color.
enum class Material : std::uint8_t { base = 0, accent = 1 };

struct Triangle {
  Vec3 a;
  Vec3 b;
  Vec3 c;
  Material material = Material::base;

  bool operator==(const Triangle&) const = default;
};

using Mesh = std::vector<Triangle>;

struct Aabb {
  Vec3 min{1e300, 1e300, 1e300};
  Vec3 max{-1e300, -1e300, -1e300};

  void extend(const Vec3& p) {
    min = {std::fmin(min.x, p.x), std::fmin(min.y, p.y), std::fmin(min.z, p.z)};
    max = {std::fmax(max.x, p.x), std::fmax(max.y, p.y), std::fmax(max.z, p.z)};
  }
  double diagonal() const { return norm(max - min); }
};

inline Aabb bounds(const Mesh& mesh) {
  Aabb box;
  for (const auto& t : mesh) {
    box.extend(t.a);
    box.extend(t.b);
    box.extend(t.c);
  }
  return box;
}

}  // namespace aerosynth
