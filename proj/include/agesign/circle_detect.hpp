#pragma once

#include <span>
#include <vector>

#include "agesign/raster.hpp"

namespace agesign {

/// Center (a0, b0) and radius r0 in pixel coordinates; pixel (x, y) has its
/// center at (x, y).
struct Circle {
  double a0 = 0.0;
  double b0 = 0.0;
  double r0 = 0.0;
  friend bool operator==(const Circle&, const Circle&) = default;
};

struct HoughParams {
  int r_min = 8;
  int r_max = 8;
  int r_step = 1;
};

/// Default radius search for a crop: [8, min(w, h) / 2], step 1.
HoughParams default_hough_params(int crop_width, int crop_height);

struct FitReport {
  Circle circle;
  double residual = 0.0;  // sum of squared algebraic distances at the fit
  double z = 0.0;         // a0^2 + b0^2 - r0^2
};

/// Unique offsets of the midpoint-circle rasterization of radius r around
/// the origin, sorted.
std::vector<Point> midpoint_circle_offsets(int radius);

/// 2D Hough accumulation for a known radius. Ties resolve to the smallest
/// (b, a).
Circle cht_known_radius(std::span<const Point> points, int radius, int acc_width,
                        int acc_height);

/// 3D (a, b, r) accumulation. Ties resolve to the smallest (r, b, a).
Circle cht_unknown_radius(std::span<const Point> points, const HoughParams& params,
                          int acc_width, int acc_height);

/// Algebraic least-squares fit: solves the 3x3 normal equations for
/// (a0, b0, z) and recovers r0 = sqrt(a0^2 + b0^2 - z).
FitReport ce_fit(std::span<const Point> points);

/// Sum over points of ((x - a)^2 + (y - b)^2 - r^2)^2.
double algebraic_residual(std::span<const Point> points, const Circle& circle);

struct Centroid {
  double x = 0.0;
  double y = 0.0;
};

Centroid centroid(std::span<const Point> points);

}  // namespace agesign
