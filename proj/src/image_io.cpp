#include "aerosynth/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "aerosynth/error.hpp"

namespace aerosynth {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_file(const std::filesystem::path& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw Error(ErrorCode::io, path.string() + ": " + std::strerror(errno));
  }
  return f;
}

[[noreturn]] void png_fail(png_structp png, png_const_charp message) {
  auto* where = static_cast<std::string*>(png_get_error_ptr(png));
  *where = message;
  png_longjmp(png, 1);
}

void png_quiet(png_structp, png_const_charp) {}

/// rows: one pointer per row, each `row_bytes` long.
void write_png(const std::filesystem::path& path, int width, int height, int bit_depth,
               int color_type, const std::vector<png_bytep>& rows) {
  File file = open_file(path, "wb");
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_quiet);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::io, path.string() + ": cannot allocate PNG writer");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::io, path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, 3);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) {
    png_set_swap(png);  // our buffers are host (little-endian) order
  }
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) {
    throw Error(ErrorCode::io, path.string() + ": write failed");
  }
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

template <typename Fn>
void read_png(const std::filesystem::path& path, Fn&& consume) {
  File file = open_file(path, "rb");
  std::string error;
  PngReader r;
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_quiet);
  r.info = r.png ? png_create_info_struct(r.png) : nullptr;
  if (!r.png || !r.info) {
    throw Error(ErrorCode::io, path.string() + ": cannot allocate PNG reader");
  }
  if (setjmp(png_jmpbuf(r.png))) {
    throw Error(ErrorCode::io, path.string() + ": " + error);
  }
  png_init_io(r.png, file.get());
  png_read_info(r.png, r.info);
  consume(r.png, r.info);
}

}  // namespace

void write_png_rgb(const std::filesystem::path& path, const Image<Rgb8>& image) {
  static_assert(sizeof(Rgb8) == 3);
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y) {
    rows[y] = reinterpret_cast<png_bytep>(const_cast<Rgb8*>(image.row(y).data()));
  }
  write_png(path, image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB, rows);
}

void write_png_ids(const std::filesystem::path& path, const Image<std::uint32_t>& ids) {
  Image<std::uint16_t> narrow(ids.width(), ids.height());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::uint32_t id = ids.pixels()[i];
    if (id > 0xffffu) {
      throw Error(ErrorCode::io, path.string() + ": instance id " + std::to_string(id) +
                                     " does not fit a 16-bit mask");
    }
    narrow.pixels()[i] = static_cast<std::uint16_t>(id);
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(narrow.height()));
  for (int y = 0; y < narrow.height(); ++y) {
    rows[y] = reinterpret_cast<png_bytep>(narrow.row(y).data());
  }
  write_png(path, narrow.width(), narrow.height(), 16, PNG_COLOR_TYPE_GRAY, rows);
}

Image<Rgb8> read_png_rgb(const std::filesystem::path& path) {
  Image<Rgb8> out;
  read_png(path, [&](png_structp png, png_infop info) {
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    out = Image<Rgb8>(w, h);
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) {
      rows[y] = reinterpret_cast<png_bytep>(out.row(y).data());
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  });
  return out;
}

Image<std::uint32_t> read_png_ids(const std::filesystem::path& path) {
  Image<std::uint32_t> out;
  read_png(path, [&](png_structp png, png_infop info) {
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    if (png_get_bit_depth(png, info) != 16 || png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
      throw Error(ErrorCode::io, path.string() + ": not a 16-bit grayscale mask");
    }
    png_set_swap(png);
    png_read_update_info(png, info);
    Image<std::uint16_t> narrow(w, h);
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) {
      rows[y] = reinterpret_cast<png_bytep>(narrow.row(y).data());
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    out = Image<std::uint32_t>(w, h);
    for (std::size_t i = 0; i < narrow.size(); ++i) {
      out.pixels()[i] = narrow.pixels()[i];
    }
  });
  return out;
}

std::pair<int, int> read_png_size(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  unsigned char header[24];
  static constexpr unsigned char kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (!in.read(reinterpret_cast<char*>(header), sizeof header) ||
      std::memcmp(header, kSignature, 8) != 0 || std::memcmp(header + 12, "IHDR", 4) != 0) {
    throw Error(ErrorCode::layout_invalid, path.string() + ": not a PNG file");
  }
  auto be32 = [&](int at) {
    return static_cast<int>((std::uint32_t{header[at]} << 24) | (std::uint32_t{header[at + 1]} << 16) |
                            (std::uint32_t{header[at + 2]} << 8) | std::uint32_t{header[at + 3]});
  };
  return {be32(16), be32(20)};
}

void write_depth_f32(const std::filesystem::path& path, const Image<float>& depth) {
  std::ofstream out(path, std::ios::binary);
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(depth.pixels().data()),
            static_cast<std::streamsize>(depth.size() * sizeof(float)));
  if (!out) {
    throw Error(ErrorCode::io, path.string() + ": write failed");
  }
}

}  // namespace aerosynth
