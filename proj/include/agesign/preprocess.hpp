#pragma once

#include <cstddef>
#include <vector>

#include "agesign/raster.hpp"

namespace agesign {

struct EdgeParams {
  /// Pixels at or above this fraction of the strongest gradient become edges.
  double threshold_fraction = 0.2;
};

struct LabeledComponents {
  int width = 0;
  int height = 0;
  std::vector<int> labels;                 // row-major, 0 = background
  std::vector<std::size_t> areas;          // areas[id - 1] is the area of label id
  std::size_t count() const noexcept { return areas.size(); }
  int label(int x, int y) const noexcept { return labels[static_cast<std::size_t>(y) * width + x]; }
};

struct CandidateObject {
  BinaryImage mask;
  std::size_t area = 0;
  Rect bounding_box;
  std::vector<Point> boundary;
};

/// 3x3 Sobel gradient magnitude, rounded and clamped to 255. The one-pixel
/// border is zero.
GrayImage sobel_magnitude(const GrayImage& img);

BinaryImage threshold_edges(const GrayImage& magnitude, const EdgeParams& params = {});

/// Background pixels not 4-connected to the image border become foreground.
BinaryImage fill_holes(const BinaryImage& edges);

/// 8-connected labeling; labels are assigned in row-major first-encounter order.
LabeledComponents label_components(const BinaryImage& filled);

/// Largest component (ties: smallest label). Throws no_candidate if no
/// component reaches min_area.
CandidateObject largest_object(const LabeledComponents& components, std::size_t min_area);

/// Foreground pixels with a background 4-neighbour or on the image border,
/// in row-major order.
std::vector<Point> boundary_of(const BinaryImage& mask);

std::vector<Point> foreground_points(const BinaryImage& mask);

/// Default min-area: 0.5% of the crop's pixel count, at least one pixel.
std::size_t default_min_area(int width, int height);

/// Intermediate stages of one corner, kept for debug dumps.
struct PreprocessStages {
  GrayImage magnitude;
  BinaryImage edges;
  BinaryImage filled;
};

/// sobel -> threshold -> fill -> label -> largest. Throws no_candidate when
/// nothing qualifies; stages (if given) are filled in either way.
CandidateObject extract_candidate(const GrayImage& gray, const EdgeParams& params,
                                  std::size_t min_area, PreprocessStages* stages = nullptr);

}  // namespace agesign
