#pragma once

#include <array>
#include <cstdint>

#include "agesign/circle_detect.hpp"
#include "agesign/raster.hpp"

namespace agesign {

inline constexpr int kGlyphRows = 80;
inline constexpr int kGlyphCols = 40;
inline constexpr int kFeatureCount = kGlyphRows;

/// Per row: number of black pixels before the first white one (40 if none).
struct FeatureVector {
  std::array<std::uint8_t, kFeatureCount> counts{};
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct GlyphCrop {
  BinaryImage mask;  // 40 wide x 80 tall, 1 = white
  bool polarity_inverted = false;
};

struct PolarityResult {
  BinaryImage crop;
  bool inverted = false;
};

/// Inverts the crop when its background reads white. The leftmost column
/// decides by majority; exact ties fall through to the next column, and a
/// fully tied image is decided by pixel (0, 0). The rule is consistent under
/// inversion, so a crop and its complement normalize to the same image.
PolarityResult normalize_polarity(const BinaryImage& crop);

/// Zhang-Suen skeletonization of the white pixels.
BinaryImage zhang_suen_thin(const BinaryImage& img);

/// Nearest-neighbour sample of the box [a0 - r0/2, a0 + r0/2] x
/// [b0 - r0, b0 + r0] into 40 x 80; samples outside the mask read as 0.
BinaryImage sample_glyph_box(const BinaryImage& mask, const Circle& circle);

/// Box sample, polarity normalization, then thinning. Throws
/// degenerate_circle for r0 < 4 or a center outside the mask.
GlyphCrop glyph_crop(const BinaryImage& mask, const Circle& circle);

FeatureVector extract_features(const GlyphCrop& crop);
FeatureVector extract_features(const BinaryImage& crop);

/// Otsu threshold over the gray levels inside the circle.
std::uint8_t otsu_threshold_in_circle(const GrayImage& gray, const Circle& circle);

/// Binarizes a gray crop (1 = brighter than the Otsu level inside the circle).
BinaryImage binarize_badge(const GrayImage& gray, const Circle& circle);

/// Keeps only pixels within keep_fraction * r0 of the center. Everything else
/// takes the majority value of the kept region, which blanks the badge's
/// outer ring and anything outside the badge.
BinaryImage isolate_glyph(const BinaryImage& mask, const Circle& circle,
                          double keep_fraction = 0.75);

}  // namespace agesign
