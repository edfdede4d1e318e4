#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include "aerosynth/image.hpp"

namespace aerosynth {

/// Lossless 8-bit RGB PNG. Output bytes depend only on the pixels.
void write_png_rgb(const std::filesystem::path& path, const Image<Rgb8>& image);

/// Lossless 16-bit grayscale PNG of instance ids; throws io if an id exceeds 65535.
void write_png_ids(const std::filesystem::path& path, const Image<std::uint32_t>& ids);

Image<Rgb8> read_png_rgb(const std::filesystem::path& path);
Image<std::uint32_t> read_png_ids(const std::filesystem::path& path);

/// Width and height from the PNG header.
std::pair<int, int> read_png_size(const std::filesystem::path& path);

/// Raw little-endian float32, row-major, no header.
void write_depth_f32(const std::filesystem::path& path, const Image<float>& depth);

}  // namespace aerosynth
