#pragma once

#include <string_view>
#include <vector>

namespace agesign {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Segment {
  Vec2 from;
  Vec2 to;
};

/// Stroke skeleton of a character in a local box x in [-0.5, 0.5],
/// y in [-1, 1] (y down). Arcs are flattened to short segments.
/// Supported characters: 1 3 7 8 +. Anything else throws invalid_argument.
const std::vector<Segment>& glyph_strokes(char c);

/// Glyph strokes scaled by `scale` pixels per local unit and moved to `center`.
std::vector<Segment> place_glyph(char c, Vec2 center, double scale);

/// Distance from p to the nearest segment; +inf for an empty list.
double distance_to_strokes(const std::vector<Segment>& strokes, Vec2 p);

/// Strokes for a short label such as "13+", laid out left to right with the
/// given glyph height in pixels; `origin` is the top-left of the text box.
std::vector<Segment> layout_text(std::string_view text, Vec2 origin, double height);

}  // namespace agesign
