#include "agesign/annotate.hpp"

#include <algorithm>
#include <cmath>

#include "agesign/glyphs.hpp"

namespace agesign {

ColorImage annotate_output(const ColorImage& frame, const Detection& detection) {
  ColorImage out = frame;
  if (detection.label == SignClass::none || !detection.circle) return out;
  const Circle& c = *detection.circle;
  const int w = out.width();
  const int h = out.height();

  const int x0 = std::max(0, static_cast<int>(std::floor(c.a0 - c.r0 - 1)));
  const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.a0 + c.r0 + 1)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.b0 - c.r0 - 1)));
  const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.b0 + c.r0 + 1)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double d = std::hypot(x - c.a0, y - c.b0);
      if (std::abs(d - c.r0) <= 0.5) out(x, y) = kOutlineColor;
    }
  }

  const int cx = static_cast<int>(std::lround(c.a0));
  const int cy = static_cast<int>(std::lround(c.b0));
  const int arm = std::max(3, static_cast<int>(c.r0 / 4));
  for (int k = -arm; k <= arm; ++k) {
    if (out.contains(cx + k, cy)) out(cx + k, cy) = kCrosshairColor;
    if (out.contains(cx, cy + k)) out(cx, cy + k) = kCrosshairColor;
  }

  // label under the circle, or above it when it would run off the bottom
  const double text_h = 16.0;
  const std::string text = to_string(detection.label);
  const double text_w = 0.8 * text_h * static_cast<double>(text.size());
  double top = c.b0 + c.r0 + 6.0;
  if (top + text_h > h - 1) top = c.b0 - c.r0 - 6.0 - text_h;
  const double left = std::clamp(c.a0 - text_w / 2, 0.0, std::max(0.0, w - 1 - text_w));
  const auto strokes = layout_text(text, Vec2{left, top}, text_h);
  const int tx0 = std::max(0, static_cast<int>(left) - 2);
  const int tx1 = std::min(w - 1, static_cast<int>(left + text_w) + 2);
  const int ty0 = std::max(0, static_cast<int>(top) - 2);
  const int ty1 = std::min(h - 1, static_cast<int>(top + text_h) + 2);
  for (int y = ty0; y <= ty1; ++y) {
    for (int x = tx0; x <= tx1; ++x) {
      if (distance_to_strokes(strokes, Vec2{double(x), double(y)}) <= 1.0) out(x, y) = kLabelColor;
    }
  }
  return out;
}

}  // namespace agesign
