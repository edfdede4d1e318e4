#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "aerosynth/renderer.hpp"
#include "aerosynth/rng.hpp"

using namespace aerosynth;

namespace {

struct P {
  long long x, y;
};

P snap(const ScreenVertex& v) {
  return {std::llround(v.x * 256.0), std::llround(v.y * 256.0)};
}

// Pixel-center inclusion test written from the rule's geometric statement: a
// center strictly inside is covered; a center on an edge is covered only if
// that edge is a top edge (horizontal, triangle below it in y-down space) or a
// left edge (triangle interior lies toward +x of it).
bool covers(P a, P b, P c, long long px, long long py) {
  auto side = [](P p, P q, long long x, long long y) {
    return (q.x - p.x) * (y - p.y) - (q.y - p.y) * (x - p.x);
  };
  const long long area = side(a, b, c.x, c.y);
  if (area == 0) return false;
  const std::array<std::array<P, 3>, 3> edges{{{a, b, c}, {b, c, a}, {c, a, b}}};
  for (const auto& [p, q, opposite] : edges) {
    const long long s = side(p, q, px, py);
    const long long s_opp = side(p, q, opposite.x, opposite.y);
    if (s != 0 && (s > 0) != (s_opp > 0)) return false;
    if (s == 0) {
      bool owned;
      if (p.y == q.y) {
        owned = opposite.y > p.y;
      } else {
        // x of the edge line at the opposite vertex's height, compared in rationals.
        const long long num = (opposite.y - p.y) * (q.x - p.x);
        const long long den = q.y - p.y;
        const long double edge_x = p.x + static_cast<long double>(num) / den;
        owned = opposite.x > edge_x;
      }
      if (!owned) return false;
    }
  }
  return true;
}

FrameBundle fresh(int w, int h) { return FrameBundle(w, h); }

}  // namespace

TEST(Rasterizer, MatchesBruteForceFillRule) {
  Rng rng(1);
  for (int trial = 0; trial < 3000; ++trial) {
    std::array<ScreenVertex, 3> tri;
    for (auto& v : tri) {
      // Quantize half the time so vertices land on pixel centers and edges.
      if (rng.chance(0.5)) {
        v = {rng.range(-2, 18) * 0.5, rng.range(-2, 18) * 0.5, 1.0};
      } else {
        v = {rng.uniform(-1.0, 9.0), rng.uniform(-1.0, 9.0), 1.0};
      }
    }
    FrameBundle frame = fresh(8, 8);
    const std::size_t written = rasterize_triangle(tri, 3, {1, 2, 3}, frame);
    const P a = snap(tri[0]), b = snap(tri[1]), c = snap(tri[2]);
    std::size_t expected = 0;
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        const bool in = covers(a, b, c, x * 256 + 128, y * 256 + 128);
        expected += in;
        ASSERT_EQ(frame.segmap.at(x, y) == 3u, in) << "trial " << trial << " pixel " << x << "," << y;
      }
    }
    EXPECT_EQ(written, expected);
  }
}

TEST(Rasterizer, HalfDiagonalOfOnePixel) {
  // Covers the lower-left half of the square (0,0)-(1,1): center (0.5, 0.5)
  // lies on the hypotenuse.
  FrameBundle lower = fresh(2, 2);
  rasterize_triangle({{{0, 0, 1}, {0, 1, 1}, {1, 1, 1}}}, 1, {}, lower);
  FrameBundle upper = fresh(2, 2);
  rasterize_triangle({{{0, 0, 1}, {1, 1, 1}, {1, 0, 1}}}, 2, {}, upper);
  // Exactly one of the two halves owns the shared center.
  EXPECT_NE(lower.segmap.at(0, 0) == 1u, upper.segmap.at(0, 0) == 2u);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x)
      if (x || y) {
        EXPECT_EQ(lower.segmap.at(x, y), 0u);
        EXPECT_EQ(upper.segmap.at(x, y), 0u);
      }
}

TEST(Rasterizer, DegenerateTriangleWritesNothing) {
  FrameBundle frame = fresh(16, 16);
  const FrameBundle before = frame;
  EXPECT_EQ(rasterize_triangle({{{1, 1, 1}, {8, 8, 1}, {15, 15, 1}}}, 4, {9, 9, 9}, frame), 0u);
  EXPECT_EQ(frame, before);
}

TEST(Rasterizer, HiddenTriangleLeavesBuffersUnchanged) {
  FrameBundle frame = fresh(16, 16);
  rasterize_triangle({{{-5, -5, 2}, {40, -5, 2}, {-5, 40, 2}}}, 1, {10, 10, 10}, frame);
  const FrameBundle before = frame;
  EXPECT_EQ(rasterize_triangle({{{2, 2, 5}, {12, 3, 5}, {4, 12, 5}}}, 2, {200, 0, 0}, frame), 0u);
  EXPECT_EQ(frame, before);
}

TEST(Rasterizer, EqualDepthDoesNotOverwrite) {
  FrameBundle frame = fresh(16, 16);
  const std::array<ScreenVertex, 3> tri{{{1, 1, 3}, {14, 2, 3}, {3, 14, 3}}};
  const std::size_t first = rasterize_triangle(tri, 1, {}, frame);
  EXPECT_GT(first, 0u);
  EXPECT_EQ(rasterize_triangle(tri, 2, {}, frame), 0u);
}

TEST(Rasterizer, SharedEdgesAreWatertight) {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    // Star-shaped polygon around a center, fanned into triangles. Angular gaps
    // stay below 180 degrees so the fan never folds over itself.
    const double cx = rng.uniform(10, 22), cy = rng.uniform(10, 22);
    const int n = rng.range(3, 9);
    std::vector<ScreenVertex> ring;
    for (int i = 0; i < n; ++i) {
      const double ang = 2 * kPi * (i + rng.uniform(0.0, 0.45)) / n;
      const double r = rng.uniform(4.0, 9.0);
      ring.push_back({cx + r * std::cos(ang), cy + r * std::sin(ang), 1.0});
    }
    Image<int> hits(32, 32, 0);
    for (int i = 0; i < n; ++i) {
      FrameBundle frame = fresh(32, 32);
      rasterize_triangle({ScreenVertex{cx, cy, 1.0}, ring[i], ring[(i + 1) % n]}, 1, {}, frame);
      for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) hits.at(x, y) += frame.segmap.at(x, y) == 1u;
    }
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        bool inside = false;
        for (int i = 0; i < n; ++i) {
          inside |= covers(snap({cx, cy, 1.0}), snap(ring[i]), snap(ring[(i + 1) % n]), x * 256 + 128,
                           y * 256 + 128);
        }
        ASSERT_LE(hits.at(x, y), 1) << "double write at " << x << "," << y;
        ASSERT_EQ(hits.at(x, y), inside ? 1 : 0) << "pinhole at " << x << "," << y;
      }
    }
  }
}

TEST(Rasterizer, PerspectiveCorrectDepth) {
  // Plane z = 2 + 0.1 * X seen by a pinhole with f = 16, c = (16, 16).
  CameraIntrinsics k{32, 32, 16.0, 16.0, 16.0};
  FrameBundle frame = fresh(32, 32);
  auto plane = [](double x, double y) { return Vec3{x, y, 2.0 + 0.1 * x}; };
  draw_camera_triangle({plane(-2, -2), plane(2, -2), plane(-2, 2)}, k, 1, {}, frame);
  int checked = 0;
  for (int v = 0; v < 32; ++v) {
    for (int u = 0; u < 32; ++u) {
      if (frame.segmap.at(u, v) != 1u) continue;
      // Ray (a, b, 1) meets the plane at z = 2 / (1 - 0.1 a).
      const double a = (u + 0.5 - 16.0) / 16.0;
      const double expected = 2.0 / (1.0 - 0.1 * a);
      EXPECT_NEAR(frame.depth.at(u, v), expected, 1e-3);
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Rasterizer, NearNearestTriangleWinsAgainstOracle) {
  CameraIntrinsics k{32, 32, 20.0, 16.0, 16.0};
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    std::array<std::array<Vec3, 3>, 2> tris;
    for (int t = 0; t < 2; ++t) {
      const double base = rng.uniform(3.0, 10.0);
      for (auto& v : tris[t]) {
        v = {rng.uniform(-1.0, 1.0) * base, rng.uniform(-1.0, 1.0) * base,
             base + rng.uniform(-1.0, 1.0)};
      }
    }
    FrameBundle frame = fresh(32, 32);
    draw_camera_triangle(tris[0], k, 1, {}, frame);
    draw_camera_triangle(tris[1], k, 2, {}, frame);

    for (int v = 0; v < 32; ++v) {
      for (int u = 0; u < 32; ++u) {
        const Vec3 ray{(u + 0.5 - k.cx) / k.focal_px, (v + 0.5 - k.cy) / k.focal_px, 1.0};
        double best = std::numeric_limits<double>::infinity();
        double second = best;
        std::uint32_t winner = 0;
        for (int t = 0; t < 2; ++t) {
          const auto& tr = tris[t];
          std::array<P, 3> s;
          for (int i = 0; i < 3; ++i) {
            s[i] = snap({k.cx + k.focal_px * tr[i].x / tr[i].z, k.cy + k.focal_px * tr[i].y / tr[i].z, 1});
          }
          if (!covers(s[0], s[1], s[2], u * 256 + 128, v * 256 + 128)) continue;
          const Vec3 n = cross(tr[1] - tr[0], tr[2] - tr[0]);
          const double z = dot(n, tr[0]) / dot(n, ray);
          if (z < best) {
            second = best;
            best = z;
            winner = static_cast<std::uint32_t>(t + 1);
          } else {
            second = std::min(second, z);
          }
        }
        if (std::isfinite(second) && second - best < 1e-3) continue;  // numerical tie
        ASSERT_EQ(frame.segmap.at(u, v), winner) << "trial " << trial << " pixel " << u << "," << v;
        if (winner) {
          // Vertex snapping moves the plane by up to 1/512 px; allow for the
          // winner's depth gradient over that distance.
          const auto& tr = tris[winner - 1];
          const Vec3 n = cross(tr[1] - tr[0], tr[2] - tr[0]);
          auto depth_at = [&](double du, double dv) {
            const Vec3 r{(u + 0.5 + du - k.cx) / k.focal_px, (v + 0.5 + dv - k.cy) / k.focal_px, 1.0};
            return dot(n, tr[0]) / dot(n, r);
          };
          const double slope = std::fabs(depth_at(0.01, 0) - best) / 0.01 +
                               std::fabs(depth_at(0, 0.01) - best) / 0.01;
          EXPECT_NEAR(frame.depth.at(u, v), best, 1e-3 * best + slope / 256.0);
        }
      }
    }
  }
}

TEST(Rasterizer, ClipsGeometryCrossingTheNearPlane) {
  CameraIntrinsics k{64, 48, 40.0, 32.0, 24.0};
  FrameBundle frame = fresh(64, 48);
  // Large ground-like triangle reaching behind the camera.
  draw_camera_triangle({Vec3{-50, 1, -5}, Vec3{50, 1, -5}, Vec3{0, 1, 100}}, k, 7, {}, frame);
  std::size_t below = 0, above = 0;
  for (int v = 0; v < 48; ++v)
    for (int u = 0; u < 64; ++u) (v >= 24 ? below : above) += frame.segmap.at(u, v) == 7u;
  EXPECT_EQ(above, 0u);
  EXPECT_GT(below, 500u);
  for (float d : frame.depth.pixels()) EXPECT_GT(d, 0.0f);
}

TEST(Rasterizer, ClippedTrianglesStayWatertight) {
  CameraIntrinsics k{64, 48, 40.0, 32.0, 24.0};
  FrameBundle frame = fresh(64, 48);
  // Quad y = 1 plane split along a diagonal that crosses the near plane.
  const Vec3 a{-30, 1, -3}, b{30, 1, -3}, c{30, 1, 60}, d{-30, 1, 60};
  std::size_t n = draw_camera_triangle({a, b, c}, k, 1, {}, frame);
  n += draw_camera_triangle({a, c, d}, k, 2, {}, frame);
  std::size_t covered = 0;
  for (int v = 25; v < 48; ++v)
    for (int u = 0; u < 64; ++u) covered += frame.segmap.at(u, v) != 0u;
  EXPECT_EQ(n, covered);
  EXPECT_EQ(covered, 64u * 23u);
}
