#include "agesign/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace agesign {

namespace {

// round(sqrt(s)) for s <= 254^2 + 254; anything larger rounds to >= 255.
constexpr int kSqrtClamp = 254 * 254 + 254;

const std::vector<std::uint8_t>& rounded_sqrt_table() {
  static const std::vector<std::uint8_t> table = [] {
    std::vector<std::uint8_t> t(kSqrtClamp + 1);
    int r = 0;
    for (int s = 0; s <= kSqrtClamp; ++s) {
      while ((r + 1) * (r + 1) <= s) ++r;
      // sqrt(s) >= r + 0.5  <=>  s >= r^2 + r + 0.25  <=>  s > r^2 + r
      t[static_cast<std::size_t>(s)] = static_cast<std::uint8_t>(s > r * r + r ? r + 1 : r);
    }
    return t;
  }();
  return table;
}

}  // namespace

GrayImage sobel_magnitude(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  if (w < 3 || h < 3) throw Error(Errc::image_too_small, "sobel needs at least 3x3 pixels");
  const auto& root = rounded_sqrt_table();
  GrayImage out(w, h, 0);
  const std::uint8_t* src = img.pixels().data();
  std::uint8_t* dst = out.pixels().data();
  for (int y = 1; y < h - 1; ++y) {
    const std::uint8_t* up = src + static_cast<std::size_t>(y - 1) * w;
    const std::uint8_t* mid = up + w;
    const std::uint8_t* dn = mid + w;
    std::uint8_t* o = dst + static_cast<std::size_t>(y) * w;
    for (int x = 1; x < w - 1; ++x) {
      const int gx = (up[x + 1] + 2 * mid[x + 1] + dn[x + 1]) - (up[x - 1] + 2 * mid[x - 1] + dn[x - 1]);
      const int gy = (dn[x - 1] + 2 * dn[x] + dn[x + 1]) - (up[x - 1] + 2 * up[x] + up[x + 1]);
      const int s = gx * gx + gy * gy;
      o[x] = s > kSqrtClamp ? 255 : root[static_cast<std::size_t>(s)];
    }
  }
  return out;
}

BinaryImage threshold_edges(const GrayImage& magnitude, const EdgeParams& params) {
  if (!(params.threshold_fraction > 0.0 && params.threshold_fraction <= 1.0)) {
    throw Error(Errc::invalid_argument, "edge threshold fraction must lie in (0, 1]");
  }
  BinaryImage out(magnitude.width(), magnitude.height(), 0);
  const auto src = magnitude.pixels();
  const int peak = src.empty() ? 0 : *std::max_element(src.begin(), src.end());
  if (peak == 0) return out;
  // m >= fraction * peak  <=>  m >= ceil(fraction * peak) for integer m
  const int cut = static_cast<int>(std::ceil(params.threshold_fraction * peak));
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] >= cut ? 1 : 0;
  return out;
}

BinaryImage fill_holes(const BinaryImage& edges) {
  const int w = edges.width();
  const int h = edges.height();
  const std::uint8_t* e = edges.pixels().data();
  // starts as all-foreground; background reachable from the border is cleared
  // by a scanline flood (4-connected)
  BinaryImage out(w, h, 1);
  std::uint8_t* o = out.pixels().data();
  auto open = [&](int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * w + x;
    return !e[i] && o[i];
  };
  std::vector<Point> stack;
  for (int x = 0; x < w; ++x) {
    stack.push_back({x, 0});
    stack.push_back({x, h - 1});
  }
  for (int y = 1; y < h - 1; ++y) {
    stack.push_back({0, y});
    stack.push_back({w - 1, y});
  }
  while (!stack.empty()) {
    const Point p = stack.back();
    stack.pop_back();
    if (!open(p.x, p.y)) continue;
    int left = p.x;
    int right = p.x;
    while (left > 0 && open(left - 1, p.y)) --left;
    while (right < w - 1 && open(right + 1, p.y)) ++right;
    std::uint8_t* row = o + static_cast<std::size_t>(p.y) * w;
    std::fill(row + left, row + right + 1, std::uint8_t{0});
    for (int ny : {p.y - 1, p.y + 1}) {
      if (ny < 0 || ny >= h) continue;
      bool in_run = false;
      for (int x = left; x <= right; ++x) {
        const bool fillable = open(x, ny);
        if (fillable && !in_run) stack.push_back({x, ny});
        in_run = fillable;
      }
    }
  }
  return out;
}

namespace {

int find_root(std::vector<int>& parent, int a) {
  while (parent[static_cast<std::size_t>(a)] != a) {
    parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
    a = parent[static_cast<std::size_t>(a)];
  }
  return a;
}

void unite(std::vector<int>& parent, int a, int b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a < b) parent[static_cast<std::size_t>(b)] = a;
  else if (b < a) parent[static_cast<std::size_t>(a)] = b;
}

}  // namespace

LabeledComponents label_components(const BinaryImage& filled) {
  // two-pass union-find, 8-connected; final ids follow the raster order of
  // each component's first pixel
  LabeledComponents result;
  const int w = filled.width();
  const int h = filled.height();
  result.width = w;
  result.height = h;
  result.labels.assign(filled.size(), 0);
  const std::uint8_t* f = filled.pixels().data();
  int* labels = result.labels.data();
  std::vector<int> parent{0};
  for (int y = 0; y < h; ++y) {
    const int* prev = y > 0 ? labels + static_cast<std::size_t>(y - 1) * w : nullptr;
    int* row = labels + static_cast<std::size_t>(y) * w;
    const std::uint8_t* frow = f + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      if (!frow[x]) continue;
      int label = 0;
      auto take = [&](int other) {
        if (other == 0) return;
        if (label == 0) label = other;
        else if (label != other) unite(parent, label, other);
      };
      if (x > 0) take(row[x - 1]);
      if (prev) {
        if (x > 0) take(prev[x - 1]);
        take(prev[x]);
        if (x < w - 1) take(prev[x + 1]);
      }
      if (label == 0) {
        label = static_cast<int>(parent.size());
        parent.push_back(label);
      }
      row[x] = label;
    }
  }
  std::vector<int> final_id(parent.size(), 0);
  for (std::size_t i = 0; i < result.labels.size(); ++i) {
    if (labels[i] == 0) continue;
    const int root = find_root(parent, labels[i]);
    int& id = final_id[static_cast<std::size_t>(root)];
    if (id == 0) {
      result.areas.push_back(0);
      id = static_cast<int>(result.areas.size());
    }
    labels[i] = id;
    ++result.areas[static_cast<std::size_t>(id - 1)];
  }
  return result;
}

namespace {

std::vector<Point> boundary_in(const BinaryImage& mask, const Rect& box) {
  std::vector<Point> points;
  const int w = mask.width();
  const int h = mask.height();
  for (int y = box.y; y < box.y + box.height; ++y) {
    for (int x = box.x; x < box.x + box.width; ++x) {
      if (!mask(x, y)) continue;
      const bool on_border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
      if (on_border || !mask(x - 1, y) || !mask(x + 1, y) || !mask(x, y - 1) ||
          !mask(x, y + 1)) {
        points.push_back({x, y});
      }
    }
  }
  return points;
}

}  // namespace

CandidateObject largest_object(const LabeledComponents& components, std::size_t min_area) {
  int best = 0;
  std::size_t best_area = 0;
  for (std::size_t i = 0; i < components.areas.size(); ++i) {
    if (components.areas[i] > best_area) {
      best_area = components.areas[i];
      best = static_cast<int>(i) + 1;
    }
  }
  if (best == 0 || best_area < std::max<std::size_t>(min_area, 1)) {
    throw Error(Errc::no_candidate, "no component reaches the minimum area");
  }
  CandidateObject object;
  object.mask = BinaryImage(components.width, components.height, 0);
  object.area = best_area;
  int x0 = components.width, y0 = components.height, x1 = -1, y1 = -1;
  const int* labels = components.labels.data();
  std::uint8_t* m = object.mask.pixels().data();
  for (int y = 0; y < components.height; ++y) {
    for (int x = 0; x < components.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * components.width + x;
      if (labels[i] != best) continue;
      m[i] = 1;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  object.bounding_box = Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
  object.boundary = boundary_in(object.mask, object.bounding_box);
  return object;
}

std::vector<Point> boundary_of(const BinaryImage& mask) {
  auto points = boundary_in(mask, Rect{0, 0, mask.width(), mask.height()});
  if (points.empty()) throw Error(Errc::empty_mask, "mask has no foreground pixels");
  return points;
}

std::vector<Point> foreground_points(const BinaryImage& mask) {
  std::vector<Point> points;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask(x, y)) points.push_back({x, y});
    }
  }
  if (points.empty()) throw Error(Errc::empty_mask, "mask has no foreground pixels");
  return points;
}

std::size_t default_min_area(int width, int height) {
  const auto area = static_cast<double>(width) * height;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.005 * area)));
}

CandidateObject extract_candidate(const GrayImage& gray, const EdgeParams& params,
                                  std::size_t min_area, PreprocessStages* stages) {
  GrayImage magnitude = sobel_magnitude(gray);
  BinaryImage edges = threshold_edges(magnitude, params);
  BinaryImage filled = fill_holes(edges);
  const LabeledComponents components = label_components(filled);
  if (stages != nullptr) {
    stages->magnitude = std::move(magnitude);
    stages->edges = std::move(edges);
    stages->filled = filled;
  }
  return largest_object(components, min_area);
}

}  // namespace agesign
