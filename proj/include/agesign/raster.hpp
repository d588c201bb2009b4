#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "agesign/error.hpp"

namespace agesign {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct GrayTag {};
struct BinaryTag {};
struct ColorTag {};

/// Row-major pixel grid with a top-left origin; y grows downward.
///
/// The tag parameter keeps gray and binary images (both byte-backed) from
/// being mixed up. Binary images store 0/1, with 1 meaning foreground/white.
template <class Pixel, class Tag>
class Raster {
 public:
  using pixel_type = Pixel;

  Raster() = default;
  Raster(int width, int height, Pixel fill = Pixel{})
      : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw Error(Errc::invalid_argument, "raster dimensions must be >= 1");
    }
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
  }
  Raster(int width, int height, std::vector<Pixel> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1 ||
        pixels_.size() != static_cast<std::size_t>(width) * height) {
      throw Error(Errc::invalid_argument, "pixel count must equal width x height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  Pixel& operator()(int x, int y) noexcept {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  const Pixel& operator()(int x, int y) const noexcept {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }

  const Pixel& at(int x, int y) const {
    if (!contains(x, y)) throw Error(Errc::region_out_of_bounds, "pixel outside raster");
    return (*this)(x, y);
  }

  std::span<Pixel> pixels() noexcept { return pixels_; }
  std::span<const Pixel> pixels() const noexcept { return pixels_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Pixel> pixels_;
};

using ColorImage = Raster<Rgb, ColorTag>;
using GrayImage = Raster<std::uint8_t, GrayTag>;
using BinaryImage = Raster<std::uint8_t, BinaryTag>;

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class Corner { upper_left, upper_right };

const char* to_string(Corner corner) noexcept;
Corner corner_from_string(const std::string& text);

/// A frame-corner crop. Construct through corner_regions(), which enforces
/// origin-y = 0 and the corner/origin consistency rule.
struct CropRegion {
  Rect rect;
  Corner corner = Corner::upper_left;
  friend bool operator==(const CropRegion&, const CropRegion&) = default;
};

/// BT.601 luma, rounded.
GrayImage to_grayscale(const ColorImage& img);

/// Grayscale of one region, without materializing the color crop.
GrayImage to_grayscale(const ColorImage& img, const Rect& region);

/// Replicates a gray image into all three channels.
ColorImage to_color(const GrayImage& img);

template <class Pixel, class Tag>
Raster<Pixel, Tag> crop(const Raster<Pixel, Tag>& img, const Rect& region) {
  if (region.width < 1 || region.height < 1) {
    throw Error(Errc::zero_size_region, "crop region has zero size");
  }
  if (region.x < 0 || region.y < 0 || region.x + region.width > img.width() ||
      region.y + region.height > img.height()) {
    throw Error(Errc::region_out_of_bounds, "crop region exceeds image bounds");
  }
  Raster<Pixel, Tag> out(region.width, region.height);
  for (int y = 0; y < region.height; ++y) {
    for (int x = 0; x < region.width; ++x) {
      out(x, y) = img(region.x + x, region.y + y);
    }
  }
  return out;
}

template <class Pixel, class Tag>
Raster<Pixel, Tag> crop(const Raster<Pixel, Tag>& img, const CropRegion& region) {
  return crop(img, region.rect);
}

/// Upper-left and upper-right corner crops of floor(fraction * dimension).
std::pair<CropRegion, CropRegion> corner_regions(int frame_width, int frame_height,
                                                 double fraction_w = 0.25,
                                                 double fraction_h = 0.25);

}  // namespace agesign
