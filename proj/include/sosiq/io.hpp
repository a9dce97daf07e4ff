#pragma once

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "sosiq/error.hpp"
#include "sosiq/image.hpp"

namespace sosiq {

// ITU-R BT.601 luminance weights.
inline double luminance(double r, double g, double b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

namespace detail {

struct PngReadCloser {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngReadCloser() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

inline GrayImage load_png(const std::string& path) {
  PngReadCloser ctx;
  ctx.fp = std::fopen(path.c_str(), "rb");
  if (!ctx.fp) throw IoError("cannot open image file: " + path);

  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                   nullptr);
  if (!ctx.png) throw IoError("libpng initialization failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw IoError("libpng initialization failed");

  if (setjmp(png_jmpbuf(ctx.png)))
    throw FormatError("corrupt or unreadable PNG: " + path);

  png_init_io(ctx.png, ctx.fp);
  png_read_info(ctx.png, ctx.info);

  const png_uint_32 w = png_get_image_width(ctx.png, ctx.info);
  const png_uint_32 h = png_get_image_height(ctx.png, ctx.info);
  const int bit_depth = png_get_bit_depth(ctx.png, ctx.info);
  const int color_type = png_get_color_type(ctx.png, ctx.info);

  if (bit_depth != 8)
    throw FormatError("unsupported PNG bit depth " + std::to_string(bit_depth) +
                      " (only 8-bit images are accepted): " + path);

  bool color = false;
  switch (color_type) {
    case PNG_COLOR_TYPE_GRAY:
      break;
    case PNG_COLOR_TYPE_GRAY_ALPHA:
      png_set_strip_alpha(ctx.png);
      break;
    case PNG_COLOR_TYPE_PALETTE:
      png_set_palette_to_rgb(ctx.png);
      color = true;
      break;
    case PNG_COLOR_TYPE_RGB:
      color = true;
      break;
    case PNG_COLOR_TYPE_RGB_ALPHA:
      png_set_strip_alpha(ctx.png);
      color = true;
      break;
    default:
      throw FormatError("unsupported PNG color type: " + path);
  }
  png_read_update_info(ctx.png, ctx.info);

  const int channels = color ? 3 : 1;
  std::vector<uint8_t> rowbuf(static_cast<size_t>(w) * channels);
  Grid<double> out(static_cast<int>(w), static_cast<int>(h));
  for (png_uint_32 r = 0; r < h; ++r) {
    png_read_row(ctx.png, rowbuf.data(), nullptr);
    for (png_uint_32 c = 0; c < w; ++c) {
      if (color) {
        const uint8_t* px = &rowbuf[c * 3];
        out.at(r, c) = luminance(px[0], px[1], px[2]);
      } else {
        out.at(r, c) = rowbuf[c];
      }
    }
  }
  png_read_end(ctx.png, nullptr);
  return GrayImage::from_grid(std::move(out));
}

inline uint32_t read_u32le(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}
inline int32_t read_i32le(const uint8_t* p) {
  return static_cast<int32_t>(read_u32le(p));
}
inline uint16_t read_u16le(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

// Uncompressed BMP: 8-bit palette, 24-bit BGR or 32-bit BGRX, bottom-up or
// top-down rows.
inline GrayImage load_bmp(const std::string& path,
                          const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 54) throw FormatError("truncated BMP header: " + path);
  const uint32_t pixel_offset = read_u32le(&bytes[10]);
  const uint32_t header_size = read_u32le(&bytes[14]);
  if (header_size < 40)
    throw FormatError("unsupported BMP header version: " + path);
  const int32_t width = read_i32le(&bytes[18]);
  const int32_t height_raw = read_i32le(&bytes[22]);
  const uint16_t bpp = read_u16le(&bytes[28]);
  const uint32_t compression = read_u32le(&bytes[30]);

  if (compression != 0)
    throw FormatError("compressed BMP files are not supported: " + path);
  if (bpp != 8 && bpp != 24 && bpp != 32)
    throw FormatError("unsupported BMP bit depth " + std::to_string(bpp) +
                      ": " + path);
  if (width <= 0 || height_raw == 0)
    throw FormatError("invalid BMP dimensions: " + path);

  const bool top_down = height_raw < 0;
  const int height = top_down ? -height_raw : height_raw;

  // Palette sits between the info header and the pixel data.
  std::vector<std::array<uint8_t, 3>> palette;
  if (bpp == 8) {
    uint32_t n_colors = read_u32le(&bytes[46]);
    if (n_colors == 0) n_colors = 256;
    const size_t pal_off = 14 + header_size;
    if (pal_off + n_colors * 4 > bytes.size())
      throw FormatError("truncated BMP palette: " + path);
    palette.resize(n_colors);
    for (uint32_t i = 0; i < n_colors; ++i) {
      const uint8_t* e = &bytes[pal_off + i * 4];  // BGRA entry
      palette[i] = {e[2], e[1], e[0]};
    }
  }

  const size_t stride = ((static_cast<size_t>(width) * bpp + 31) / 32) * 4;
  if (pixel_offset + stride * height > bytes.size())
    throw FormatError("truncated BMP pixel data: " + path);

  Grid<double> out(width, height);
  for (int r = 0; r < height; ++r) {
    const int src_row = top_down ? r : height - 1 - r;
    const uint8_t* row = &bytes[pixel_offset + stride * src_row];
    for (int c = 0; c < width; ++c) {
      if (bpp == 8) {
        const uint8_t idx = row[c];
        if (idx >= palette.size())
          throw FormatError("BMP palette index out of range: " + path);
        const auto& rgb = palette[idx];
        out.at(r, c) = luminance(rgb[0], rgb[1], rgb[2]);
      } else {
        const uint8_t* px = &row[c * (bpp / 8)];  // BGR(X)
        out.at(r, c) = luminance(px[2], px[1], px[0]);
      }
    }
  }
  return GrayImage::from_grid(std::move(out));
}

}  // namespace detail

// Decodes a PNG or BMP file (dispatch on magic bytes) to real-valued
// luminance. Color inputs use BT.601 weights; no requantization.
inline GrayImage load_gray(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open image file: " + path);
  uint8_t magic[8] = {0};
  probe.read(reinterpret_cast<char*>(magic), 8);
  const std::streamsize got = probe.gcount();

  static const uint8_t png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a,
                                     0x1a, 0x0a};
  GrayImage img;
  if (got >= 8 && std::memcmp(magic, png_sig, 8) == 0) {
    probe.close();
    img = detail::load_png(path);
  } else if (got >= 2 && magic[0] == 'B' && magic[1] == 'M') {
    probe.seekg(0, std::ios::end);
    const std::streamsize n = probe.tellg();
    probe.seekg(0);
    std::vector<uint8_t> bytes(static_cast<size_t>(n));
    probe.read(reinterpret_cast<char*>(bytes.data()), n);
    if (!probe) throw IoError("failed reading image file: " + path);
    img = detail::load_bmp(path, bytes);
  } else {
    throw FormatError("unsupported image format (expected PNG or BMP): " +
                      path);
  }

  if (!img.meets_pipeline_minimum())
    throw DimensionError("image " + path + " is smaller than 16x16 pixels");
  return img;
}

// 8-bit grayscale PNG; values are rounded and clamped on write.
inline void save_png_gray(const std::string& path, const Grid<double>& g) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot create file: " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(fp);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("PNG write failed: " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, g.width(), g.height(), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<uint8_t> row(g.width());
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      long v = std::lround(std::clamp(g.at(r, c), 0.0, 255.0));
      row[c] = static_cast<uint8_t>(v);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

// Binary PGM (P5, maxval 255) debug dump; values are scaled by 255 and
// rounded, i.e. intended for [0, 1]-ranged similarity maps.
inline void save_pgm_scaled(const std::string& path, const Grid<double>& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create file: " + path);
  out << "P5\n" << g.width() << " " << g.height() << "\n255\n";
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c) {
      long v = std::lround(g.at(r, c) * 255.0);
      out.put(static_cast<char>(std::clamp(v, 0L, 255L)));
    }
  if (!out) throw IoError("failed writing PGM: " + path);
}

}  // namespace sosiq
