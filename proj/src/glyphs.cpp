#include "agesign/glyphs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "agesign/error.hpp"

namespace agesign {
namespace {

// Elliptical arc from angle `from` to `to` (degrees, y down, 0 = +x).
void add_arc(std::vector<Segment>& out, Vec2 c, double rx, double ry, double from, double to,
             int pieces) {
  auto at = [&](double deg) {
    const double t = deg * std::numbers::pi / 180.0;
    return Vec2{c.x + rx * std::cos(t), c.y + ry * std::sin(t)};
  };
  Vec2 prev = at(from);
  for (int i = 1; i <= pieces; ++i) {
    const Vec2 next = at(from + (to - from) * i / pieces);
    out.push_back({prev, next});
    prev = next;
  }
}

std::vector<Segment> make_glyph(char c) {
  std::vector<Segment> s;
  switch (c) {
    case '1':
      s.push_back({{0.0, -0.8}, {0.0, 0.8}});
      s.push_back({{0.0, -0.8}, {-0.3, -0.55}});
      break;
    case '3':
      add_arc(s, {0.0, -0.45}, 0.45, 0.45, 200.0, 450.0, 40);
      add_arc(s, {0.0, 0.475}, 0.5, 0.475, 270.0, 520.0, 40);
      break;
    case '7':
      s.push_back({{-0.5, -0.9}, {0.5, -0.9}});
      s.push_back({{0.5, -0.9}, {-0.1, 0.95}});
      break;
    case '8':
      add_arc(s, {0.0, -0.48}, 0.4, 0.42, 0.0, 360.0, 48);
      add_arc(s, {0.0, 0.45}, 0.5, 0.5, 0.0, 360.0, 48);
      break;
    case '+':
      s.push_back({{-0.5, 0.0}, {0.5, 0.0}});
      s.push_back({{0.0, -0.5}, {0.0, 0.5}});
      break;
    default:
      throw Error(Errc::invalid_argument, std::string("no glyph for '") + c + "'");
  }
  return s;
}

}  // namespace

const std::vector<Segment>& glyph_strokes(char c) {
  static const std::vector<Segment> one = make_glyph('1');
  static const std::vector<Segment> three = make_glyph('3');
  static const std::vector<Segment> seven = make_glyph('7');
  static const std::vector<Segment> eight = make_glyph('8');
  static const std::vector<Segment> plus = make_glyph('+');
  switch (c) {
    case '1': return one;
    case '3': return three;
    case '7': return seven;
    case '8': return eight;
    case '+': return plus;
    default: throw Error(Errc::invalid_argument, std::string("no glyph for '") + c + "'");
  }
}

std::vector<Segment> place_glyph(char c, Vec2 center, double scale) {
  std::vector<Segment> out;
  for (const Segment& s : glyph_strokes(c)) {
    out.push_back({{center.x + scale * s.from.x, center.y + scale * s.from.y},
                   {center.x + scale * s.to.x, center.y + scale * s.to.y}});
  }
  return out;
}

double distance_to_strokes(const std::vector<Segment>& strokes, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : strokes) {
    const double vx = s.to.x - s.from.x;
    const double vy = s.to.y - s.from.y;
    const double wx = p.x - s.from.x;
    const double wy = p.y - s.from.y;
    const double len2 = vx * vx + vy * vy;
    const double t = len2 > 0 ? std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0) : 0.0;
    const double dx = wx - t * vx;
    const double dy = wy - t * vy;
    best = std::min(best, dx * dx + dy * dy);
  }
  return std::sqrt(best);
}

std::vector<Segment> layout_text(std::string_view text, Vec2 origin, double height) {
  // The local box is 1 wide and 2 tall; advance by 0.8 of the height.
  const double scale = height / 2.0;
  const double advance = 0.8 * height;
  std::vector<Segment> out;
  double x = origin.x + 0.5 * scale;
  for (char c : text) {
    const auto placed = place_glyph(c, {x, origin.y + scale}, scale);
    out.insert(out.end(), placed.begin(), placed.end());
    x += advance;
  }
  return out;
}

}  // namespace agesign
