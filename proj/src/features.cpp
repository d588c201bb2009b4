#include "agesign/features.hpp"

#include <cmath>
#include <vector>

namespace agesign {

PolarityResult normalize_polarity(const BinaryImage& crop) {
  const int w = crop.width();
  const int h = crop.height();
  bool invert = crop(0, 0) != 0;
  for (int x = 0; x < w; ++x) {
    int white = 0;
    for (int y = 0; y < h; ++y) white += crop(x, y) ? 1 : 0;
    if (2 * white != h) {
      invert = 2 * white > h;
      break;
    }
  }
  if (!invert) return {crop, false};
  BinaryImage out(w, h);
  auto src = crop.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 0 : 1;
  return {std::move(out), true};
}

BinaryImage zhang_suen_thin(const BinaryImage& img) {
  const int w = img.width();
  const int h = img.height();
  BinaryImage cur = img;
  auto at = [&](int x, int y) -> int { return cur.contains(x, y) && cur(x, y) ? 1 : 0; };
  std::vector<Point> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      marked.clear();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!cur(x, y)) continue;
          // p2..p9 clockwise from north.
          const int p[8] = {at(x, y - 1),     at(x + 1, y - 1), at(x + 1, y),
                            at(x + 1, y + 1), at(x, y + 1),     at(x - 1, y + 1),
                            at(x - 1, y),     at(x - 1, y - 1)};
          int neighbours = 0;
          int transitions = 0;
          for (int k = 0; k < 8; ++k) {
            neighbours += p[k];
            if (p[k] == 0 && p[(k + 1) % 8] == 1) ++transitions;
          }
          if (neighbours < 2 || neighbours > 6 || transitions != 1) continue;
          const int n = p[0], e = p[2], s = p[4], wv = p[6];
          const bool remove = pass == 0 ? (n * e * s == 0 && e * s * wv == 0)
                                        : (n * e * wv == 0 && n * s * wv == 0);
          if (remove) marked.push_back({x, y});
        }
      }
      for (const Point& q : marked) cur(q.x, q.y) = 0;
      if (!marked.empty()) changed = true;
    }
  }
  return cur;
}

BinaryImage sample_glyph_box(const BinaryImage& mask, const Circle& circle) {
  BinaryImage out(kGlyphCols, kGlyphRows, 0);
  const double step = circle.r0 / kGlyphCols;  // same step both ways: 2r0 / 80
  const double left = circle.a0 - circle.r0 / 2.0;
  const double top = circle.b0 - circle.r0;
  for (int i = 0; i < kGlyphRows; ++i) {
    const int sy = static_cast<int>(std::floor(top + (i + 0.5) * step + 0.5));
    for (int j = 0; j < kGlyphCols; ++j) {
      const int sx = static_cast<int>(std::floor(left + (j + 0.5) * step + 0.5));
      out(j, i) = mask.contains(sx, sy) ? mask(sx, sy) : 0;
    }
  }
  return out;
}

GlyphCrop glyph_crop(const BinaryImage& mask, const Circle& circle) {
  if (!(circle.r0 >= 4.0)) {
    throw Error(Errc::degenerate_circle, "radius below 4 px cannot be resized meaningfully");
  }
  const int cx = static_cast<int>(std::floor(circle.a0 + 0.5));
  const int cy = static_cast<int>(std::floor(circle.b0 + 0.5));
  if (!mask.contains(cx, cy)) {
    throw Error(Errc::region_out_of_bounds, "circle center lies outside the mask");
  }
  auto normalized = normalize_polarity(sample_glyph_box(mask, circle));
  return GlyphCrop{zhang_suen_thin(normalized.crop), normalized.inverted};
}

FeatureVector extract_features(const BinaryImage& crop) {
  if (crop.width() != kGlyphCols || crop.height() != kGlyphRows) {
    throw Error(Errc::invalid_argument, "feature extraction needs a 40x80 crop");
  }
  FeatureVector features;
  for (int y = 0; y < kGlyphRows; ++y) {
    int count = kGlyphCols;
    for (int x = 0; x < kGlyphCols; ++x) {
      if (crop(x, y)) {
        count = x;
        break;
      }
    }
    features.counts[static_cast<std::size_t>(y)] = static_cast<std::uint8_t>(count);
  }
  return features;
}

FeatureVector extract_features(const GlyphCrop& crop) { return extract_features(crop.mask); }

std::uint8_t otsu_threshold_in_circle(const GrayImage& gray, const Circle& circle) {
  std::array<double, 256> histogram{};
  double total = 0;
  const double r2 = circle.r0 * circle.r0;
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      const double dx = x - circle.a0;
      const double dy = y - circle.b0;
      if (dx * dx + dy * dy > r2) continue;
      histogram[gray(x, y)] += 1;
      total += 1;
    }
  }
  if (total == 0) return 128;
  double sum_all = 0;
  for (int v = 0; v < 256; ++v) sum_all += v * histogram[v];
  double weight_low = 0, sum_low = 0, best = -1;
  int threshold = 0;
  for (int t = 0; t < 256; ++t) {
    weight_low += histogram[t];
    if (weight_low == 0) continue;
    const double weight_high = total - weight_low;
    if (weight_high == 0) break;
    sum_low += t * histogram[t];
    const double mean_low = sum_low / weight_low;
    const double mean_high = (sum_all - sum_low) / weight_high;
    const double between = weight_low * weight_high * (mean_low - mean_high) * (mean_low - mean_high);
    if (between > best) {
      best = between;
      threshold = t;
    }
  }
  return static_cast<std::uint8_t>(threshold);
}

BinaryImage binarize_badge(const GrayImage& gray, const Circle& circle) {
  const std::uint8_t level = otsu_threshold_in_circle(gray, circle);
  BinaryImage out(gray.width(), gray.height());
  auto src = gray.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > level ? 1 : 0;
  return out;
}

BinaryImage isolate_glyph(const BinaryImage& mask, const Circle& circle, double keep_fraction) {
  const double keep = keep_fraction * circle.r0;
  const double keep2 = keep * keep;
  auto inside = [&](int x, int y) {
    const double dx = x - circle.a0;
    const double dy = y - circle.b0;
    return dx * dx + dy * dy <= keep2;
  };
  long white = 0, kept = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!inside(x, y)) continue;
      ++kept;
      white += mask(x, y) ? 1 : 0;
    }
  }
  std::uint8_t fill = 2 * white > kept ? 1 : 0;
  if (2 * white == kept) {
    // Exact tie: follow the center pixel so complementary masks stay complementary.
    const int cx = static_cast<int>(std::floor(circle.a0 + 0.5));
    const int cy = static_cast<int>(std::floor(circle.b0 + 0.5));
    fill = mask.contains(cx, cy) && mask(cx, cy) ? 0 : 1;
  }
  BinaryImage out = mask;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!inside(x, y)) out(x, y) = fill;
    }
  }
  return out;
}

}  // namespace agesign
