#include <gtest/gtest.h>

#include <cstring>

#include "aerosynth/error.hpp"
#include "aerosynth/image_io.hpp"
#include "aerosynth/rng.hpp"
#include "test_support.hpp"

using namespace aerosynth;

TEST(ImageIo, RgbRoundTrip) {
  testing_support::TempDir dir("png");
  Image<Rgb8> img(37, 21);
  Rng rng(1);
  for (auto& p : img.pixels()) {
    p = {static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
         static_cast<std::uint8_t>(rng.below(256))};
  }
  write_png_rgb(dir / "a.png", img);
  EXPECT_EQ(read_png_rgb(dir / "a.png"), img);
  EXPECT_EQ(read_png_size(dir / "a.png"), (std::pair<int, int>{37, 21}));
}

TEST(ImageIo, IdRoundTripSixteenBit) {
  testing_support::TempDir dir("png");
  Image<std::uint32_t> ids(19, 11, 0);
  ids.at(3, 4) = 65535;
  ids.at(0, 0) = 1;
  ids.at(18, 10) = 300;
  write_png_ids(dir / "m.png", ids);
  EXPECT_EQ(read_png_ids(dir / "m.png"), ids);
  ids.at(1, 1) = 70000;
  EXPECT_THROW(write_png_ids(dir / "n.png", ids), Error);
}

TEST(ImageIo, EncodingIsByteStable) {
  testing_support::TempDir dir("png");
  Image<Rgb8> img(64, 64, {10, 20, 30});
  write_png_rgb(dir / "a.png", img);
  write_png_rgb(dir / "b.png", img);
  EXPECT_EQ(testing_support::read_file(dir / "a.png"), testing_support::read_file(dir / "b.png"));
}

TEST(ImageIo, NonPngIsRejected) {
  testing_support::TempDir dir("png");
  testing_support::write_file(dir / "x.png", "hello world, not an image at all");
  EXPECT_THROW(read_png_size(dir / "x.png"), Error);
  EXPECT_THROW(read_png_rgb(dir / "x.png"), Error);
  EXPECT_THROW(read_png_rgb(dir / "missing.png"), Error);
}

TEST(ImageIo, DepthIsRawLittleEndianFloat) {
  testing_support::TempDir dir("depth");
  Image<float> d(3, 2, 1.5f);
  d.at(2, 1) = 42.0f;
  write_depth_f32(dir / "d.f32", d);
  const std::string bytes = testing_support::read_file(dir / "d.f32");
  ASSERT_EQ(bytes.size(), 24u);
  float last = 0.0f;
  std::memcpy(&last, bytes.data() + 20, 4);
  EXPECT_EQ(last, 42.0f);
}
