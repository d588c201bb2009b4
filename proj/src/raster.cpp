#include "agesign/raster.hpp"

#include <cmath>

namespace agesign {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::region_out_of_bounds: return "region-out-of-bounds";
    case Errc::zero_size_region: return "zero-size-region";
    case Errc::malformed_header: return "malformed-header";
    case Errc::truncated_payload: return "truncated-payload";
    case Errc::unsupported_format: return "unsupported-format";
    case Errc::unsupported_maxval: return "unsupported-maxval";
    case Errc::image_too_small: return "image-too-small";
    case Errc::no_candidate: return "no-candidate";
    case Errc::empty_mask: return "empty-mask";
    case Errc::empty_point_set: return "empty-point-set";
    case Errc::empty_radius_range: return "empty-radius-range";
    case Errc::singular_system: return "singular-system";
    case Errc::negative_radicand: return "negative-radicand";
    case Errc::degenerate_circle: return "degenerate-circle";
    case Errc::empty_dataset: return "empty-dataset";
    case Errc::non_finite_loss: return "non-finite-loss";
    case Errc::bad_magic: return "bad-magic";
    case Errc::shape_mismatch: return "shape-mismatch";
    case Errc::truncated: return "truncated";
    case Errc::badge_too_small: return "badge-too-small";
    case Errc::badge_out_of_corner: return "badge-out-of-corner";
    case Errc::io_failure: return "io-failure";
    case Errc::empty_split: return "empty-split";
  }
  return "unknown";
}

const char* to_string(Corner corner) noexcept {
  return corner == Corner::upper_left ? "upper-left" : "upper-right";
}

Corner corner_from_string(const std::string& text) {
  if (text == "upper-left") return Corner::upper_left;
  if (text == "upper-right") return Corner::upper_right;
  throw Error(Errc::invalid_argument, "unknown corner '" + text + "'");
}

GrayImage to_grayscale(const ColorImage& img) {
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  // exact in integers: round(0.299 R + 0.587 G + 0.114 B), halves up
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<std::uint8_t>((299 * src[i].r + 587 * src[i].g + 114 * src[i].b + 500) / 1000);
  }
  return out;
}

GrayImage to_grayscale(const ColorImage& img, const Rect& region) {
  if (region.width < 1 || region.height < 1) {
    throw Error(Errc::zero_size_region, "crop region has zero size");
  }
  if (region.x < 0 || region.y < 0 || region.x + region.width > img.width() ||
      region.y + region.height > img.height()) {
    throw Error(Errc::region_out_of_bounds, "crop region exceeds image bounds");
  }
  GrayImage out(region.width, region.height);
  for (int y = 0; y < region.height; ++y) {
    const Rgb* src = &img(region.x, region.y + y);
    std::uint8_t* dst = &out(0, y);
    for (int x = 0; x < region.width; ++x) {
      dst[x] = static_cast<std::uint8_t>((299 * src[x].r + 587 * src[x].g + 114 * src[x].b + 500) / 1000);
    }
  }
  return out;
}

ColorImage to_color(const GrayImage& img) {
  ColorImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = Rgb{src[i], src[i], src[i]};
  return out;
}

std::pair<CropRegion, CropRegion> corner_regions(int frame_width, int frame_height,
                                                 double fraction_w, double fraction_h) {
  if (!(fraction_w > 0.0 && fraction_w <= 1.0 && fraction_h > 0.0 && fraction_h <= 1.0)) {
    throw Error(Errc::zero_size_region, "corner fractions must lie in (0, 1]");
  }
  const int w = static_cast<int>(std::floor(fraction_w * frame_width));
  const int h = static_cast<int>(std::floor(fraction_h * frame_height));
  if (w < 1 || h < 1) throw Error(Errc::zero_size_region, "corner region rounds to zero size");
  CropRegion left{Rect{0, 0, w, h}, Corner::upper_left};
  CropRegion right{Rect{frame_width - w, 0, w, h}, Corner::upper_right};
  return {left, right};
}

}  // namespace agesign
