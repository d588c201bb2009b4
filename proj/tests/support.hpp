#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "agesign/raster.hpp"
#include "agesign/rng.hpp"

namespace agesign::test {

inline BinaryImage disc_mask(int w, int h, double cx, double cy, double r) {
  BinaryImage img(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (std::hypot(x - cx, y - cy) <= r) img(x, y) = 1;
    }
  }
  return img;
}

inline GrayImage gray_disc(int w, int h, double cx, double cy, double r, std::uint8_t inside = 230,
                           std::uint8_t outside = 40) {
  GrayImage img(w, h, outside);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (std::hypot(x - cx, y - cy) <= r) img(x, y) = inside;
    }
  }
  return img;
}

inline BinaryImage random_binary(int w, int h, Rng& rng, double p = 0.5) {
  BinaryImage img(w, h, 0);
  for (auto& v : img.pixels()) v = rng.coin(p) ? 1 : 0;
  return img;
}

inline BinaryImage complement(const BinaryImage& img) {
  BinaryImage out = img;
  for (auto& v : out.pixels()) v = v ? 0 : 1;
  return out;
}

inline std::size_t count_set(const BinaryImage& img) {
  std::size_t n = 0;
  for (auto v : img.pixels()) n += v;
  return n;
}

// Symmetric Hausdorff distance between the white pixels of two masks.
// Infinite if exactly one of them is empty.
inline double hausdorff(const BinaryImage& a, const BinaryImage& b) {
  std::vector<Point> pa, pb;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      if (a(x, y)) pa.push_back({x, y});
  for (int y = 0; y < b.height(); ++y)
    for (int x = 0; x < b.width(); ++x)
      if (b(x, y)) pb.push_back({x, y});
  if (pa.empty() && pb.empty()) return 0.0;
  if (pa.empty() || pb.empty()) return INFINITY;
  auto directed = [](const std::vector<Point>& from, const std::vector<Point>& to) {
    double worst = 0.0;
    for (const Point& p : from) {
      double best = INFINITY;
      for (const Point& q : to) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

}  // namespace agesign::test
