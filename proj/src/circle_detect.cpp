#include "agesign/circle_detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

namespace agesign {
namespace {

void require_points(std::span<const Point> points) {
  if (points.empty()) throw Error(Errc::empty_point_set, "no points to fit");
}

void require_accumulator(int acc_width, int acc_height) {
  if (acc_width < 1 || acc_height < 1) {
    throw Error(Errc::invalid_argument, "accumulator dimensions must be positive");
  }
}

// Votes every point along the offset ring into a w x h slice.
void accumulate(std::span<const Point> points, std::span<const Point> offsets, int w, int h,
                std::vector<std::uint32_t>& slice) {
  std::fill(slice.begin(), slice.end(), 0u);
  for (const Point& p : points) {
    for (const Point& d : offsets) {
      const int a = p.x + d.x;
      const int b = p.y + d.y;
      if (a < 0 || b < 0 || a >= w || b >= h) continue;
      ++slice[static_cast<std::size_t>(b) * w + a];
    }
  }
}

// Returns (votes, index) of the first maximal cell in row-major order.
std::pair<std::uint32_t, std::size_t> slice_peak(const std::vector<std::uint32_t>& slice) {
  std::uint32_t best = 0;
  std::size_t index = 0;
  for (std::size_t i = 0; i < slice.size(); ++i) {
    if (slice[i] > best) {
      best = slice[i];
      index = i;
    }
  }
  return {best, index};
}

}  // namespace

HoughParams default_hough_params(int crop_width, int crop_height) {
  HoughParams params;
  params.r_min = 8;
  params.r_max = std::max(params.r_min, std::min(crop_width, crop_height) / 2);
  params.r_step = 1;
  return params;
}

std::vector<Point> midpoint_circle_offsets(int radius) {
  if (radius < 1) throw Error(Errc::invalid_argument, "radius must be positive");
  std::vector<Point> offsets;
  int x = 0;
  int y = radius;
  int decision = 1 - radius;
  while (x <= y) {
    const std::array<Point, 8> octants = {Point{x, y},  Point{y, x},  Point{-x, y},
                                          Point{-y, x}, Point{x, -y}, Point{y, -x},
                                          Point{-x, -y}, Point{-y, -x}};
    offsets.insert(offsets.end(), octants.begin(), octants.end());
    ++x;
    if (decision < 0) {
      decision += 2 * x + 1;
    } else {
      --y;
      decision += 2 * (x - y) + 1;
    }
  }
  std::sort(offsets.begin(), offsets.end(),
            [](const Point& l, const Point& r) { return l.y != r.y ? l.y < r.y : l.x < r.x; });
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  return offsets;
}

Circle cht_known_radius(std::span<const Point> points, int radius, int acc_width,
                        int acc_height) {
  require_points(points);
  require_accumulator(acc_width, acc_height);
  if (radius < 1) throw Error(Errc::invalid_argument, "radius must be positive");
  const auto offsets = midpoint_circle_offsets(radius);
  std::vector<std::uint32_t> slice(static_cast<std::size_t>(acc_width) * acc_height);
  accumulate(points, offsets, acc_width, acc_height, slice);
  const auto [votes, index] = slice_peak(slice);
  (void)votes;
  return Circle{static_cast<double>(index % acc_width), static_cast<double>(index / acc_width),
                static_cast<double>(radius)};
}

Circle cht_unknown_radius(std::span<const Point> points, const HoughParams& params,
                          int acc_width, int acc_height) {
  require_points(points);
  require_accumulator(acc_width, acc_height);
  if (params.r_min < 1 || params.r_step < 1) {
    throw Error(Errc::invalid_argument, "radius range needs r_min >= 1 and r_step >= 1");
  }
  if (params.r_max < params.r_min) {
    throw Error(Errc::empty_radius_range,
                "r_max " + std::to_string(params.r_max) + " < r_min " +
                    std::to_string(params.r_min));
  }
  // The (a, b, r) accumulator is scanned one radius slice at a time; a slice
  // only replaces the running best on a strictly larger peak, which yields
  // the smallest-(r, b, a) tie break.
  std::vector<std::uint32_t> slice(static_cast<std::size_t>(acc_width) * acc_height);
  std::uint32_t best_votes = 0;
  Circle best{0.0, 0.0, static_cast<double>(params.r_min)};
  for (int r = params.r_min; r <= params.r_max; r += params.r_step) {
    accumulate(points, midpoint_circle_offsets(r), acc_width, acc_height, slice);
    const auto [votes, index] = slice_peak(slice);
    if (votes > best_votes) {
      best_votes = votes;
      best = Circle{static_cast<double>(index % acc_width),
                    static_cast<double>(index / acc_width), static_cast<double>(r)};
    }
  }
  return best;
}

FitReport ce_fit(std::span<const Point> points) {
  if (points.size() < 3) {
    throw Error(points.empty() ? Errc::empty_point_set : Errc::singular_system,
                "circle fit needs at least 3 points");
  }
  // Moments are taken about an integer origin near the mean: the sums stay
  // exact in double precision and the normal matrix stays well conditioned.
  double mx = 0.0, my = 0.0;
  for (const Point& p : points) {
    mx += p.x;
    my += p.y;
  }
  const double n = static_cast<double>(points.size());
  const double ox = std::round(mx / n);
  const double oy = std::round(my / n);

  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, sxxx_xyy = 0, sxxy_yyy = 0;
  for (const Point& p : points) {
    const double x = p.x - ox;
    const double y = p.y - oy;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
    sxxx_xyy += x * x * x + x * y * y;
    sxxy_yyy += x * x * y + y * y * y;
  }

  std::array<std::array<double, 4>, 3> m = {{
      {2 * sxx, 2 * sxy, -sx, sxxx_xyy},
      {2 * sxy, 2 * syy, -sy, sxxy_yyy},
      {2 * sx, 2 * sy, -n, sxx + syy},
  }};
  double largest = 0.0;
  for (const auto& row : m) {
    for (int c = 0; c < 3; ++c) largest = std::max(largest, std::abs(row[c]));
  }
  const double tolerance = 1e-9 * largest;

  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    }
    if (std::abs(m[pivot][col]) <= tolerance) {
      throw Error(Errc::singular_system, "points are collinear or degenerate");
    }
    std::swap(m[col], m[pivot]);
    for (int row = col + 1; row < 3; ++row) {
      const double factor = m[row][col] / m[col][col];
      for (int k = col; k < 4; ++k) m[row][k] -= factor * m[col][k];
    }
  }
  std::array<double, 3> solution{};
  for (int row = 2; row >= 0; --row) {
    double acc = m[row][3];
    for (int k = row + 1; k < 3; ++k) acc -= m[row][k] * solution[k];
    solution[row] = acc / m[row][row];
  }

  const double a_local = solution[0];
  const double b_local = solution[1];
  const double z_local = solution[2];
  const double radicand = a_local * a_local + b_local * b_local - z_local;
  if (!(radicand > 0.0)) {
    throw Error(Errc::negative_radicand, "fitted squared radius is not positive");
  }
  FitReport report;
  report.circle = Circle{a_local + ox, b_local + oy, std::sqrt(radicand)};
  report.z = report.circle.a0 * report.circle.a0 + report.circle.b0 * report.circle.b0 -
             radicand;
  report.residual = algebraic_residual(points, report.circle);
  return report;
}

double algebraic_residual(std::span<const Point> points, const Circle& circle) {
  double total = 0.0;
  const double r2 = circle.r0 * circle.r0;
  for (const Point& p : points) {
    const double dx = p.x - circle.a0;
    const double dy = p.y - circle.b0;
    const double e = dx * dx + dy * dy - r2;
    total += e * e;
  }
  return total;
}

Centroid centroid(std::span<const Point> points) {
  require_points(points);
  double sx = 0.0, sy = 0.0;
  for (const Point& p : points) {
    sx += p.x;
    sy += p.y;
  }
  const double n = static_cast<double>(points.size());
  return {sx / n, sy / n};
}

}  // namespace agesign
