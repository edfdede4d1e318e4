#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "aerosynth/annotation.hpp"
#include "aerosynth/error.hpp"
#include "aerosynth/rng.hpp"

using namespace aerosynth;

namespace {

using Partition = std::set<std::pair<std::uint32_t, std::vector<std::pair<int, int>>>>;

// Breadth-first flood fill over the 8-neighbourhood.
Partition bfs_components(const Image<std::uint32_t>& img) {
  Partition out;
  Image<std::uint8_t> seen(img.width(), img.height(), 0);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::uint32_t id = img.at(x, y);
      if (id == 0 || seen.at(x, y)) continue;
      std::vector<std::pair<int, int>> pixels;
      std::queue<std::pair<int, int>> q;
      q.push({x, y});
      seen.at(x, y) = 1;
      while (!q.empty()) {
        const auto [cx, cy] = q.front();
        q.pop();
        pixels.push_back({cx, cy});
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (img.contains(nx, ny) && !seen.at(nx, ny) && img.at(nx, ny) == id) {
              seen.at(nx, ny) = 1;
              q.push({nx, ny});
            }
          }
        }
      }
      std::sort(pixels.begin(), pixels.end());
      out.insert({id, pixels});
    }
  }
  return out;
}

Partition as_partition(const std::vector<InstanceMask>& masks) {
  Partition out;
  for (const auto& m : masks) {
    std::vector<std::pair<int, int>> pixels;
    for (const auto& p : m.pixels) pixels.push_back({p.x, p.y});
    std::sort(pixels.begin(), pixels.end());
    out.insert({m.instance_id, pixels});
  }
  return out;
}

InstanceClassTable classes_up_to(std::uint32_t n) {
  InstanceClassTable t;
  for (std::uint32_t i = 1; i <= n; ++i) t[i] = i % 2 ? ClassId::drone : ClassId::bird;
  return t;
}

InstanceMask rect_mask(int x0, int y0, int w, int h) {
  InstanceMask m;
  m.instance_id = 1;
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) m.pixels.push_back({x, y});
  return m;
}

}  // namespace

TEST(ConnectedComponents, EmptySegmap) {
  EXPECT_TRUE(connected_components(Image<std::uint32_t>(16, 16, 0), {}).empty());
}

TEST(ConnectedComponents, SingleSquare) {
  Image<std::uint32_t> img(8, 8, 0);
  img.at(2, 2) = img.at(3, 2) = img.at(2, 3) = img.at(3, 3) = 7;
  const auto masks = connected_components(img, {{7, ClassId::bird}});
  ASSERT_EQ(masks.size(), 1u);
  EXPECT_EQ(masks[0].pixels.size(), 4u);
  EXPECT_EQ(masks[0].instance_id, 7u);
  EXPECT_EQ(masks[0].cls, ClassId::bird);
}

TEST(ConnectedComponents, DiagonalTouchJoinsGapSplits) {
  Image<std::uint32_t> diag(8, 8, 0);
  diag.at(1, 1) = diag.at(2, 2) = 5;
  EXPECT_EQ(connected_components(diag, {{5, ClassId::drone}}).size(), 1u);
  EXPECT_EQ(bfs_components(diag).size(), 1u);
  Image<std::uint32_t> gap(8, 8, 0);
  gap.at(1, 1) = gap.at(3, 3) = 5;
  EXPECT_EQ(connected_components(gap, {{5, ClassId::drone}}).size(), 2u);
  EXPECT_EQ(bfs_components(gap).size(), 2u);
}

TEST(ConnectedComponents, UnknownIdThrows) {
  Image<std::uint32_t> img(4, 4, 0);
  img.at(1, 1) = 9;
  try {
    connected_components(img, {{1, ClassId::drone}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_id);
  }
}

TEST(ConnectedComponents, MatchesFloodFillOracle) {
  Rng rng(10);
  for (int trial = 0; trial < 300; ++trial) {
    Image<std::uint32_t> img(64, 64, 0);
    const double density = rng.uniform(0.05, 0.7);
    const std::uint32_t ids = 1 + static_cast<std::uint32_t>(rng.below(6));
    for (auto& v : img.pixels()) v = rng.chance(density) ? 1 + static_cast<std::uint32_t>(rng.below(ids)) : 0;
    const auto masks = connected_components(img, classes_up_to(ids));
    ASSERT_EQ(as_partition(masks), bfs_components(img)) << "trial " << trial;
    for (std::size_t i = 1; i < masks.size(); ++i) {
      const auto a = masks[i - 1].pixels.front(), b = masks[i].pixels.front();
      ASSERT_TRUE(a.y < b.y || (a.y == b.y && a.x < b.x));
    }
  }
}

TEST(TightBox, Examples) {
  InstanceMask m;
  m.pixels = {{3, 5}};
  EXPECT_EQ(tight_box(m), (PixelBox{3, 5, 4, 6}));
  m.pixels = {{0, 0}, {9, 0}, {0, 9}};
  EXPECT_EQ(tight_box(m), (PixelBox{0, 0, 10, 10}));
  m.pixels.clear();
  EXPECT_THROW(tight_box(m), Error);
}

TEST(TightBox, MatchesExtremaScanAndIsTight) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    InstanceMask m;
    int x0 = 1000, y0 = 1000, x1 = -1, y1 = -1;
    for (int i = 0; i < 50; ++i) {
      const PixelPos p{static_cast<int>(rng.below(200)), static_cast<int>(rng.below(100))};
      m.pixels.push_back(p);
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    const PixelBox b = tight_box(m);
    EXPECT_EQ(b, (PixelBox{x0, y0, x1 + 1, y1 + 1}));
    auto any = [&](auto pred) { return std::any_of(m.pixels.begin(), m.pixels.end(), pred); };
    EXPECT_TRUE(any([&](PixelPos p) { return p.x == b.x_min; }));
    EXPECT_TRUE(any([&](PixelPos p) { return p.x == b.x_max - 1; }));
    EXPECT_TRUE(any([&](PixelPos p) { return p.y == b.y_min; }));
    EXPECT_TRUE(any([&](PixelPos p) { return p.y == b.y_max - 1; }));
  }
}

TEST(ToYolo, Examples) {
  EXPECT_EQ(to_yolo({0, 0, 1920, 1080}, ClassId::drone, 1920, 1080),
            (AnnotationRecord{ClassId::drone, 0.5, 0.5, 1.0, 1.0}));
  EXPECT_EQ(to_yolo({480, 270, 1440, 810}, ClassId::bird, 1920, 1080),
            (AnnotationRecord{ClassId::bird, 0.5, 0.5, 0.5, 0.5}));
  const auto r = to_yolo({100, 200, 105, 208}, ClassId::drone, 1920, 1080);
  EXPECT_DOUBLE_EQ(r.x_c, 205.0 / 3840.0);
  EXPECT_DOUBLE_EQ(r.y_c, 408.0 / 2160.0);
  EXPECT_DOUBLE_EQ(r.w, 5.0 / 1920.0);
  EXPECT_DOUBLE_EQ(r.h, 8.0 / 1080.0);
  EXPECT_NEAR(r.x_c, 0.053385, 5e-7);
  EXPECT_NEAR(r.y_c, 0.188889, 5e-7);
}

TEST(ToYolo, RejectsBoxesOutsideImage) {
  for (const PixelBox& b : {PixelBox{-1, 0, 5, 5}, PixelBox{0, 0, 1921, 5}, PixelBox{5, 5, 5, 9},
                            PixelBox{0, 3, 4, 1081}}) {
    try {
      to_yolo(b, ClassId::drone, 1920, 1080);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::box_out_of_bounds);
    }
  }
}

TEST(ToYolo, InverseRecoversBox) {
  Rng rng(12);
  for (int trial = 0; trial < 5000; ++trial) {
    const int W = 16 + static_cast<int>(rng.below(4000)), H = 16 + static_cast<int>(rng.below(3000));
    const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(W)));
    const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(H)));
    const PixelBox b{x0, y0, rng.range(x0 + 1, W), rng.range(y0 + 1, H)};
    const auto r = to_yolo(b, ClassId::drone, W, H);
    EXPECT_EQ(from_yolo(r, W, H), b);
    const auto parsed = parse_labels(serialize_labels({r}));
    ASSERT_EQ(parsed.size(), 1u);
    const PixelBox back = from_yolo(parsed[0], W, H);
    EXPECT_LE(std::abs(back.x_min - b.x_min), 1);
    EXPECT_LE(std::abs(back.x_max - b.x_max), 1);
    EXPECT_LE(std::abs(back.y_min - b.y_min), 1);
    EXPECT_LE(std::abs(back.y_max - b.y_max), 1);
  }
}

TEST(FilterInstances, SizeBand) {
  std::vector<OversizeWarning> oversize;
  auto kept = filter_instances({rect_mask(0, 0, 3, 2)}, 100, 100, &oversize);
  EXPECT_TRUE(kept.empty());
  kept = filter_instances({rect_mask(0, 0, 5, 5)}, 100, 100, &oversize);
  EXPECT_EQ(kept.size(), 1u);
  kept = filter_instances({rect_mask(10, 10, 2, 5)}, 100, 100, &oversize);
  EXPECT_EQ(kept.size(), 1u);  // longer side counts
  EXPECT_TRUE(oversize.empty());
  kept = filter_instances({rect_mask(0, 0, 50, 50)}, 100, 100, &oversize);
  EXPECT_EQ(kept.size(), 1u);
  ASSERT_EQ(oversize.size(), 1u);
  EXPECT_DOUBLE_EQ(oversize[0].area_fraction, 0.25);
  oversize.clear();
  filter_instances({rect_mask(0, 0, 40, 50)}, 100, 100, &oversize);
  EXPECT_TRUE(oversize.empty());  // exactly 20% is allowed
}

TEST(Labels, EmptyListSerializesToNothing) { EXPECT_EQ(serialize_labels({}), ""); }

TEST(Labels, LineFormat) {
  EXPECT_EQ(serialize_labels({{ClassId::drone, 0.5, 0.5, 1.0, 1.0}}),
            "0 0.500000 0.500000 1.000000 1.000000\n");
}

TEST(Labels, LargestBoxFirst) {
  const std::string text = serialize_labels({{ClassId::bird, 0.1, 0.1, 0.01, 0.01},
                                             {ClassId::drone, 0.5, 0.5, 0.2, 0.2}});
  EXPECT_EQ(text.substr(0, 2), "0 ");
}

TEST(Labels, RoundTripWithinHalfMicro) {
  Rng rng(13);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<AnnotationRecord> rs(1 + rng.below(5));
    for (auto& r : rs) {
      r = {rng.chance(0.5) ? ClassId::drone : ClassId::bird, rng.uniform(), rng.uniform(),
           rng.uniform(), rng.uniform()};
    }
    const auto back = parse_labels(serialize_labels(rs));
    ASSERT_EQ(back.size(), rs.size());
    for (const auto& b : back) {
      const bool found = std::any_of(rs.begin(), rs.end(), [&](const AnnotationRecord& r) {
        return r.cls == b.cls && std::fabs(r.x_c - b.x_c) <= 5e-7 && std::fabs(r.y_c - b.y_c) <= 5e-7 &&
               std::fabs(r.w - b.w) <= 5e-7 && std::fabs(r.h - b.h) <= 5e-7;
      });
      EXPECT_TRUE(found);
    }
  }
}

TEST(Labels, StrictParserRejectsMalformedLines) {
  for (const char* bad : {"0 0.5 0.5 0.1 0.1\n", "2 0.500000 0.500000 0.100000 0.100000\n",
                          "0 0.500000 0.500000 0.100000\n", "0 0.500000 0.500000 0.100000 0.100000",
                          "0 0.500000 0.500000 0.100000 1.100000\n", "x\n",
                          "0  0.500000 0.500000 0.100000 0.100000\n"}) {
    try {
      parse_labels(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::layout_invalid);
      EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos) << e.what();
    }
  }
}

TEST(AnnotateSegmap, OccludedInstanceYieldsFragments) {
  Image<std::uint32_t> seg(40, 20, 0);
  for (int y = 5; y < 15; ++y)
    for (int x = 2; x < 38; ++x) seg.at(x, y) = 1;
  for (int y = 0; y < 20; ++y)
    for (int x = 18; x < 22; ++x) seg.at(x, y) = 2;
  const auto res = annotate_segmap(seg, {{1, ClassId::drone}, {2, ClassId::bird}});
  EXPECT_EQ(res.fragments, 3u);
  ASSERT_EQ(res.annotations.size(), 3u);
  for (const auto& a : res.annotations) {
    EXPECT_EQ(a.record, to_yolo(a.box, a.record.cls, 40, 20));
  }
}
