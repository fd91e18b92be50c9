// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "image/image.hpp"

#include <png.h>

#include <cstring>

#include "core/error.hpp"
#include "core/util.hpp"

namespace flowy::image {

Image::Image(int width, int height, Rgba fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::invalid_argument, "image dimensions must be positive");
  pixels_.resize(static_cast<std::size_t>(width) * height * 4);
  for (std::size_t i = 0; i < pixels_.size(); i += 4) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
    pixels_[i + 3] = fill.a;
  }
}

Rgba Image::get(int x, int y) const {
  const auto* p = &pixels_[(static_cast<std::size_t>(y) * width_ + x) * 4];
  return Rgba{p[0], p[1], p[2], p[3]};
}

void Image::set(int x, int y, Rgba c) {
  if (!contains(x, y)) return;
  auto* p = &pixels_[(static_cast<std::size_t>(y) * width_ + x) * 4];
  p[0] = c.r;
  p[1] = c.g;
  p[2] = c.b;
  p[3] = c.a;
}

namespace {

struct PngImage {
  png_image img;
  PngImage() {
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&img); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

Image finish_read(PngImage& png, const std::string& what) {
  png.img.format = PNG_FORMAT_RGBA;
  if (png.img.width == 0 || png.img.height == 0) throw Error(ErrorCode::io, what + ": empty image");
  Image out(static_cast<int>(png.img.width), static_cast<int>(png.img.height));
  if (!png_image_finish_read(&png.img, nullptr, out.pixels().data(), 0, nullptr))
    throw Error(ErrorCode::io, what + ": " + png.img.message);
  return out;
}

}  // namespace

Size read_png_size(const std::filesystem::path& path) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.img, path.c_str()))
    throw Error(ErrorCode::io, "cannot read image " + path.string() + ": " + png.img.message);
  return Size{static_cast<int>(png.img.width), static_cast<int>(png.img.height)};
}

Image load_png(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return decode_png(bytes);
  } catch (const Error& e) {
    throw Error(ErrorCode::io, "cannot load image " + path.string() + ": " + e.what());
  }
}

Image decode_png(std::string_view bytes) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.img, bytes.data(), bytes.size()))
    throw Error(ErrorCode::io, std::string("cannot decode PNG: ") + png.img.message);
  return finish_read(png, "cannot decode PNG");
}

std::string encode_png(const Image& img) {
  PngImage png;
  png.img.width = static_cast<png_uint_32>(img.width());
  png.img.height = static_cast<png_uint_32>(img.height());
  png.img.format = PNG_FORMAT_RGBA;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.img, nullptr, &size, 0, img.pixels().data(), 0, nullptr))
    throw Error(ErrorCode::internal, std::string("PNG encode failed: ") + png.img.message);
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&png.img, out.data(), &size, 0, img.pixels().data(), 0, nullptr))
    throw Error(ErrorCode::internal, std::string("PNG encode failed: ") + png.img.message);
  out.resize(size);
  return out;
}

}  // namespace flowy::image
