#include <algorithm>
#include <cmath>
#include <vector>

#include "aerosynth/renderer.hpp"

namespace aerosynth {
namespace {

struct Fixed {
  std::int64_t x;
  std::int64_t y;
};

// Snapped coordinates beyond this are refused; the clipper keeps real geometry
// far inside it and edge products stay within int64.
constexpr double kMaxCoordinate = 1.0e6;

std::int64_t edge(const Fixed& a, const Fixed& b, std::int64_t px, std::int64_t py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// For a triangle with positive edge-function area in y-down screen space.
bool top_left(const Fixed& a, const Fixed& b) {
  return (a.y == b.y && b.x > a.x) || b.y < a.y;
}

}  // namespace

std::size_t rasterize_triangle(const std::array<ScreenVertex, 3>& tri, std::uint32_t instance_id,
                               Rgb8 color, FrameBundle& frame) {
  std::array<Fixed, 3> v;
  std::array<double, 3> inv_z;
  for (int i = 0; i < 3; ++i) {
    const auto& s = tri[i];
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !(s.depth > 0.0) ||
        std::fabs(s.x) > kMaxCoordinate || std::fabs(s.y) > kMaxCoordinate) {
      return 0;
    }
    v[i] = {std::llround(s.x * kSubpixelSteps), std::llround(s.y * kSubpixelSteps)};
    inv_z[i] = 1.0 / s.depth;
  }
  std::int64_t area = edge(v[0], v[1], v[2].x, v[2].y);
  if (area == 0) {
    return 0;
  }
  if (area < 0) {
    std::swap(v[1], v[2]);
    std::swap(inv_z[1], inv_z[2]);
    area = -area;
  }

  const std::int64_t half = kSubpixelSteps / 2;
  auto first_pixel = [&](std::int64_t lo) {
    // smallest p with p*S + S/2 >= lo
    const std::int64_t n = lo - half;
    return n >= 0 ? (n + kSubpixelSteps - 1) / kSubpixelSteps : -((-n) / kSubpixelSteps);
  };
  auto last_pixel = [&](std::int64_t hi) {
    const std::int64_t n = hi - half;
    return n >= 0 ? n / kSubpixelSteps : -((-n + kSubpixelSteps - 1) / kSubpixelSteps);
  };
  const std::int64_t min_x = std::max<std::int64_t>(0, first_pixel(std::min({v[0].x, v[1].x, v[2].x})));
  const std::int64_t max_x =
      std::min<std::int64_t>(frame.width() - 1, last_pixel(std::max({v[0].x, v[1].x, v[2].x})));
  const std::int64_t min_y = std::max<std::int64_t>(0, first_pixel(std::min({v[0].y, v[1].y, v[2].y})));
  const std::int64_t max_y =
      std::min<std::int64_t>(frame.height() - 1, last_pixel(std::max({v[0].y, v[1].y, v[2].y})));
  if (min_x > max_x || min_y > max_y) {
    return 0;
  }

  // Edge i is opposite vertex i.
  const std::array<std::pair<int, int>, 3> edges{{{1, 2}, {2, 0}, {0, 1}}};
  std::array<std::int64_t, 3> bias, step_x, step_y, row_start;
  const std::int64_t px0 = min_x * kSubpixelSteps + half;
  const std::int64_t py0 = min_y * kSubpixelSteps + half;
  for (int i = 0; i < 3; ++i) {
    const Fixed& a = v[edges[i].first];
    const Fixed& b = v[edges[i].second];
    bias[i] = top_left(a, b) ? 0 : -1;
    step_x[i] = -(b.y - a.y) * kSubpixelSteps;
    step_y[i] = (b.x - a.x) * kSubpixelSteps;
    row_start[i] = edge(a, b, px0, py0);
  }

  const double inv_area = 1.0 / static_cast<double>(area);
  std::size_t written = 0;
  for (std::int64_t y = min_y; y <= max_y; ++y) {
    std::array<std::int64_t, 3> w = row_start;
    auto depth_row = frame.depth.row(static_cast<int>(y));
    auto rgb_row = frame.rgb.row(static_cast<int>(y));
    auto seg_row = frame.segmap.row(static_cast<int>(y));
    for (std::int64_t x = min_x; x <= max_x; ++x) {
      if (w[0] + bias[0] >= 0 && w[1] + bias[1] >= 0 && w[2] + bias[2] >= 0) {
        const double iz = (static_cast<double>(w[0]) * inv_z[0] +
                           static_cast<double>(w[1]) * inv_z[1] +
                           static_cast<double>(w[2]) * inv_z[2]) *
                          inv_area;
        const float depth = static_cast<float>(1.0 / iz);
        if (depth < depth_row[x]) {
          depth_row[x] = depth;
          rgb_row[x] = color;
          seg_row[x] = instance_id;
          ++written;
        }
      }
      w[0] += step_x[0];
      w[1] += step_x[1];
      w[2] += step_x[2];
    }
    row_start[0] += step_y[0];
    row_start[1] += step_y[1];
    row_start[2] += step_y[2];
  }
  return written;
}

namespace {

struct ClipPlane {
  double a, b, c;  // a*x + b*y + c*z >= 0 keeps the point (plus offset for near)
  double offset;
  double eval(const Vec3& p) const { return a * p.x + b * p.y + c * p.z - offset; }
};

bool lex_less(const Vec3& p, const Vec3& q) {
  if (p.x != q.x) return p.x < q.x;
  if (p.y != q.y) return p.y < q.y;
  return p.z < q.z;
}

// Crossing point computed from a canonical endpoint order, so two triangles
// sharing an edge get bit-identical clip vertices.
Vec3 intersect(const ClipPlane& plane, Vec3 p, Vec3 q) {
  if (lex_less(q, p)) {
    std::swap(p, q);
  }
  const double dp = plane.eval(p);
  const double dq = plane.eval(q);
  const double t = dp / (dp - dq);
  return p + (q - p) * t;
}

void clip_polygon(std::vector<Vec3>& poly, std::vector<Vec3>& scratch, const ClipPlane& plane) {
  scratch.clear();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& cur = poly[i];
    const Vec3& nxt = poly[(i + 1) % n];
    const bool cur_in = plane.eval(cur) >= 0.0;
    const bool nxt_in = plane.eval(nxt) >= 0.0;
    if (cur_in) {
      scratch.push_back(cur);
    }
    if (cur_in != nxt_in) {
      scratch.push_back(intersect(plane, cur, nxt));
    }
  }
  poly.swap(scratch);
}

}  // namespace

std::size_t draw_camera_triangle(const std::array<Vec3, 3>& camera_tri, const CameraIntrinsics& k,
                                 std::uint32_t instance_id, Rgb8 color, FrameBundle& frame) {
  const double guard = std::max(k.width, k.height);
  const double f = k.focal_px;
  const std::array<ClipPlane, 5> planes{{
      {0, 0, 1, kNearPlane},
      {f, 0, k.cx + guard, 0},
      {-f, 0, k.width + guard - k.cx, 0},
      {0, f, k.cy + guard, 0},
      {0, -f, k.height + guard - k.cy, 0},
  }};

  bool inside_all = true;
  for (const auto& plane : planes) {
    int outside = 0;
    for (const auto& p : camera_tri) {
      if (plane.eval(p) < 0.0) {
        ++outside;
      }
    }
    if (outside == 3) {
      return 0;
    }
    inside_all = inside_all && outside == 0;
  }

  auto to_screen = [&](const Vec3& p) {
    return ScreenVertex{k.cx + f * p.x / p.z, k.cy + f * p.y / p.z, p.z};
  };
  if (inside_all) {
    return rasterize_triangle({to_screen(camera_tri[0]), to_screen(camera_tri[1]),
                               to_screen(camera_tri[2])},
                              instance_id, color, frame);
  }

  thread_local std::vector<Vec3> poly, scratch;
  poly.assign(camera_tri.begin(), camera_tri.end());
  for (const auto& plane : planes) {
    clip_polygon(poly, scratch, plane);
    if (poly.size() < 3) {
      return 0;
    }
  }
  std::size_t written = 0;
  const ScreenVertex anchor = to_screen(poly[0]);
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    written += rasterize_triangle({anchor, to_screen(poly[i]), to_screen(poly[i + 1])},
                                  instance_id, color, frame);
  }
  return written;
}

}  // namespace aerosynth
