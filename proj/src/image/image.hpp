// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace flowy::image {

struct Rgba {
  std::uint8_t r = 0, g = 0, b = 0, a = 255;
  bool operator==(const Rgba&) const = default;
};

// 8-bit RGBA raster, row-major.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgba fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  Rgba get(int x, int y) const;
  void set(int x, int y, Rgba c);  // ignores out-of-bounds writes

  const std::vector<std::uint8_t>& pixels() const { return pixels_; }
  std::vector<std::uint8_t>& pixels() { return pixels_; }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct Size {
  int width = 0;
  int height = 0;
};

// Reads only the PNG header. Throws Error{io} naming the path.
Size read_png_size(const std::filesystem::path& path);

Image load_png(const std::filesystem::path& path);
Image decode_png(std::string_view bytes);

// Deterministic for identical pixels (no timestamp chunks).
std::string encode_png(const Image& img);

}  // namespace flowy::image
