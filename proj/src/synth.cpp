#include "agesign/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "agesign/features.hpp"
#include "agesign/pnm.hpp"
#include "agesign/rng.hpp"

namespace agesign {
namespace {

using json = nlohmann::json;

const Rgb kLight{245, 245, 245};

Rgb class_color(SignClass label) {
  switch (label) {
    case SignClass::age7: return {20, 80, 160};
    case SignClass::age13: return {170, 70, 10};
    case SignClass::age18: return {180, 20, 30};
    case SignClass::none: break;
  }
  return {60, 60, 60};
}

// Stroke geometry of one badge, built once per render.
struct BadgeGeometry {
  explicit BadgeGeometry(const BadgeSpec& spec) : spec(spec) {
    const Vec2 c = spec.center;
    const double r = spec.radius;
    switch (spec.label) {
      case SignClass::age7:
        append(place_glyph('7', c, 0.5 * r));
        break;
      case SignClass::age13:
        append(place_glyph('1', {c.x - 0.68 * r, c.y}, 0.4 * r));
        append(place_glyph('3', c, 0.5 * r));
        break;
      case SignClass::age18:
        append(place_glyph('1', {c.x - 0.68 * r, c.y}, 0.4 * r));
        append(place_glyph('8', c, 0.5 * r));
        break;
      case SignClass::none:
        throw Error(Errc::invalid_argument, "a badge needs an age class");
    }
    append(place_glyph('+', {c.x + 0.66 * r, c.y}, 0.2 * r));
  }

  void append(const std::vector<Segment>& more) { strokes.insert(strokes.end(), more.begin(), more.end()); }

  BadgePixel classify(Vec2 p) const {
    const double dx = p.x - spec.center.x;
    const double dy = p.y - spec.center.y;
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d > spec.radius) return BadgePixel::outside;
    if (d > spec.radius - spec.ring_thickness) return BadgePixel::ink;
    if (distance_to_strokes(strokes, p) <= spec.stroke_width / 2.0) return BadgePixel::ink;
    return BadgePixel::fill;
  }

  const BadgeSpec& spec;
  std::vector<Segment> strokes;
};

void validate_badge(const BadgeSpec& spec) {
  if (!(spec.radius >= kMinBadgeRadius)) {
    throw Error(Errc::badge_too_small, "badge radius must be at least 12 px");
  }
  if (spec.label == SignClass::none) {
    throw Error(Errc::invalid_argument, "a badge needs an age class");
  }
}

std::uint8_t clamp_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

Rgb jitter(Rgb base, Rng& rng, int amount) {
  auto j = [&](std::uint8_t v) { return clamp_byte(v + rng.uniform_int(-amount, amount)); };
  return {j(base.r), j(base.g), j(base.b)};
}

Rgb mix(Rgb a, Rgb b, double t) {
  return {clamp_byte(a.r + (b.r - a.r) * t), clamp_byte(a.g + (b.g - a.g) * t),
          clamp_byte(a.b + (b.b - a.b) * t)};
}

Rgb shift(Rgb c, double delta) {
  return {clamp_byte(c.r + delta), clamp_byte(c.g + delta), clamp_byte(c.b + delta)};
}

void paint_background(ColorImage& img, Background kind, Rng& rng) {
  const int g = rng.uniform_int(140, 185);
  const Rgb base = jitter(Rgb{static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(g),
                              static_cast<std::uint8_t>(g)},
                          rng, 8);
  const int w = img.width();
  const int h = img.height();
  switch (kind) {
    case Background::flat:
      for (auto& p : img.pixels()) p = base;
      break;
    case Background::gradient: {
      const Rgb other = jitter(base, rng, 25);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          img(x, y) = mix(base, other, (x + y) / static_cast<double>(w + h - 2));
        }
      }
      break;
    }
    case Background::seeded_noise: {
      // Bilinear value noise on a 24 px lattice, +-12 gray levels.
      const int cell = 24;
      const int gw = w / cell + 2;
      const int gh = h / cell + 2;
      std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
      for (double& v : lattice) v = rng.uniform(-12.0, 12.0);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const int cx = x / cell, cy = y / cell;
          const double fx = (x % cell) / static_cast<double>(cell);
          const double fy = (y % cell) / static_cast<double>(cell);
          auto at = [&](int i, int j) { return lattice[static_cast<std::size_t>(j) * gw + i]; };
          const double top = at(cx, cy) * (1 - fx) + at(cx + 1, cy) * fx;
          const double bottom = at(cx, cy + 1) * (1 - fx) + at(cx + 1, cy + 1) * fx;
          img(x, y) = shift(base, top * (1 - fy) + bottom * fy);
        }
      }
      break;
    }
    case Background::checker: {
      const int square = 32;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          img(x, y) = shift(base, ((x / square + y / square) % 2) ? 4.0 : -4.0);
        }
      }
      break;
    }
  }
}

bool inside_decoy(const DecoySpec& d, Vec2 p) {
  const double dx = p.x - d.center.x;
  const double dy = p.y - d.center.y;
  switch (d.shape) {
    case DecoyShape::rectangle:
      return std::abs(dx) <= d.half_width && std::abs(dy) <= d.half_height;
    case DecoyShape::ellipse: {
      const double u = dx / d.half_width;
      const double v = dy / d.half_height;
      return u * u + v * v <= 1.0;
    }
    case DecoyShape::triangle: {
      if (dy < -d.half_height || dy > d.half_height) return false;
      const double half = d.half_width * (dy + d.half_height) / (2.0 * d.half_height);
      return std::abs(dx) <= half;
    }
  }
  return false;
}

void paint_decoy(ColorImage& img, const DecoySpec& d) {
  Rng rng(d.seed);
  struct Bar {
    double y0, y1, x0, x1;
  };
  std::vector<Bar> bars;
  const int count = rng.uniform_int(1, 3);
  for (int i = 0; i < count; ++i) {
    const double thick = rng.uniform(2.5, 5.0);
    const double y = d.center.y + rng.uniform(-0.5, 0.5) * d.half_height;
    const double len = rng.uniform(0.4, 0.8) * d.half_width;
    const double x = d.center.x + rng.uniform(-0.3, 0.3) * d.half_width;
    bars.push_back({y - thick / 2, y + thick / 2, x - len, x + len});
  }
  const int x0 = std::max(0, static_cast<int>(std::floor(d.center.x - d.half_width)) - 1);
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(d.center.x + d.half_width)) + 1);
  const int y0 = std::max(0, static_cast<int>(std::floor(d.center.y - d.half_height)) - 1);
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(d.center.y + d.half_height)) + 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
      if (!inside_decoy(d, p)) continue;
      bool marked = false;
      for (const Bar& b : bars) {
        if (p.y >= b.y0 && p.y <= b.y1 && p.x >= b.x0 && p.x <= b.x1) marked = true;
      }
      img(x, y) = marked ? d.marks : d.body;
    }
  }
}

void paint_badge(ColorImage& img, const BadgeSpec& spec) {
  const BadgeGeometry geometry(spec);
  const Rgb dark = class_color(spec.label);
  const Rgb fill = spec.polarity == Polarity::positive ? dark : kLight;
  const Rgb ink = spec.polarity == Polarity::positive ? kLight : dark;
  const int x0 = std::max(0, static_cast<int>(std::floor(spec.center.x - spec.radius)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(spec.center.x + spec.radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(spec.center.y - spec.radius)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(spec.center.y + spec.radius)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      switch (geometry.classify({static_cast<double>(x), static_cast<double>(y)})) {
        case BadgePixel::outside: break;
        case BadgePixel::fill: img(x, y) = fill; break;
        case BadgePixel::ink: img(x, y) = ink; break;
      }
    }
  }
}

Rect corner_rect(Corner corner, int frame_width, int frame_height) {
  const auto [left, right] = corner_regions(frame_width, frame_height);
  return corner == Corner::upper_left ? left.rect : right.rect;
}

Corner opposite(Corner c) {
  return c == Corner::upper_left ? Corner::upper_right : Corner::upper_left;
}

double noise_level(int stratum, double max_sigma) {
  static constexpr double kLevels[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  return kLevels[stratum % 5] * max_sigma;
}

double sweep_radius(int stratum, double jitter, const CorpusParams& p) {
  const double t = std::fmod((stratum + 0.5) * 0.6180339887498949 + jitter, 1.0);
  return p.r_min + (p.r_max - p.r_min) * t;
}

std::string frame_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%05zu.ppm", index);
  return buf;
}

}  // namespace

const char* to_string(Background background) noexcept {
  switch (background) {
    case Background::flat: return "flat";
    case Background::gradient: return "gradient";
    case Background::seeded_noise: return "seeded-noise";
    case Background::checker: return "checker";
  }
  return "flat";
}

const char* to_string(Polarity polarity) noexcept {
  return polarity == Polarity::positive ? "positive" : "negative";
}

BadgeSpec make_badge(SignClass label, double radius, Vec2 center, Polarity polarity) {
  BadgeSpec spec;
  spec.label = label;
  spec.radius = radius;
  spec.center = center;
  spec.polarity = polarity;
  spec.ring_thickness = std::max(2.0, 0.1 * radius);
  spec.stroke_width = std::max(2.0, 0.1 * radius);
  return spec;
}

BadgePixel badge_pixel(const BadgeSpec& spec, Vec2 p) {
  validate_badge(spec);
  return BadgeGeometry(spec).classify(p);
}

BadgeRender render_badge(const BadgeSpec& spec) {
  validate_badge(spec);
  const BadgeGeometry geometry(spec);
  const int x0 = static_cast<int>(std::floor(spec.center.x - spec.radius)) - 2;
  const int y0 = static_cast<int>(std::floor(spec.center.y - spec.radius)) - 2;
  const int x1 = static_cast<int>(std::ceil(spec.center.x + spec.radius)) + 2;
  const int y1 = static_cast<int>(std::ceil(spec.center.y + spec.radius)) + 2;
  const bool positive = spec.polarity == Polarity::positive;
  BadgeRender out;
  out.origin = {x0, y0};
  out.circle = Circle{spec.center.x - x0, spec.center.y - y0, spec.radius};
  out.mask = BinaryImage(x1 - x0 + 1, y1 - y0 + 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const bool ink =
          geometry.classify({static_cast<double>(x), static_cast<double>(y)}) == BadgePixel::ink;
      out.mask(x - x0, y - y0) = (ink == positive) ? 1 : 0;
    }
  }
  return out;
}

BinaryImage reference_glyph(const BadgeSpec& spec, double keep_fraction) {
  validate_badge(spec);
  const BadgeGeometry geometry(spec);
  const double r = spec.radius;
  const double step = r / kGlyphCols;
  const double keep = keep_fraction * r;
  BinaryImage out(kGlyphCols, kGlyphRows, 0);
  for (int i = 0; i < kGlyphRows; ++i) {
    for (int j = 0; j < kGlyphCols; ++j) {
      const Vec2 p{spec.center.x - r / 2 + (j + 0.5) * step, spec.center.y - r + (i + 0.5) * step};
      const double dx = p.x - spec.center.x;
      const double dy = p.y - spec.center.y;
      if (dx * dx + dy * dy > keep * keep) continue;
      out(j, i) = geometry.classify(p) == BadgePixel::ink ? 1 : 0;
    }
  }
  return zhang_suen_thin(out);
}

void validate_frame_spec(const FrameSpec& spec) {
  if (spec.width < 8 || spec.height < 8) throw Error(Errc::invalid_argument, "frame too small");
  if (spec.noise_sigma < 0) throw Error(Errc::invalid_argument, "noise sigma must be >= 0");
  if (spec.badge) {
    validate_badge(*spec.badge);
    const Rect r = corner_rect(spec.corner, spec.width, spec.height);
    const BadgeSpec& b = *spec.badge;
    if (b.center.x - b.radius < r.x || b.center.x + b.radius > r.x + r.width - 1 ||
        b.center.y - b.radius < r.y || b.center.y + b.radius > r.y + r.height - 1) {
      throw Error(Errc::badge_out_of_corner, "badge does not fit its corner region");
    }
  }
  if (spec.decoy) {
    const DecoySpec& d = *spec.decoy;
    const Rect left = corner_rect(Corner::upper_left, spec.width, spec.height);
    const Rect right = corner_rect(Corner::upper_right, spec.width, spec.height);
    auto fits = [&](const Rect& r) {
      return d.center.x - d.half_width >= r.x && d.center.x + d.half_width <= r.x + r.width - 1 &&
             d.center.y - d.half_height >= r.y && d.center.y + d.half_height <= r.y + r.height - 1;
    };
    if (!fits(left) && !fits(right)) {
      throw Error(Errc::badge_out_of_corner, "decoy does not fit a corner region");
    }
  }
}

RenderedFrame render_frame(const FrameSpec& spec) {
  validate_frame_spec(spec);
  Rng rng(spec.seed);
  RenderedFrame out;
  out.image = ColorImage(spec.width, spec.height);
  paint_background(out.image, spec.background, rng);
  if (spec.decoy) paint_decoy(out.image, *spec.decoy);
  if (spec.badge) paint_badge(out.image, *spec.badge);
  if (spec.noise_sigma > 0) {
    for (Rgb& p : out.image.pixels()) {
      p.r = clamp_byte(p.r + spec.noise_sigma * rng.normal());
      p.g = clamp_byte(p.g + spec.noise_sigma * rng.normal());
      p.b = clamp_byte(p.b + spec.noise_sigma * rng.normal());
    }
  }
  out.entry.seed = spec.seed;
  out.entry.corner = spec.corner;
  if (spec.badge) {
    out.entry.label = spec.badge->label;
    out.entry.circle = Circle{spec.badge->center.x, spec.badge->center.y, spec.badge->radius};
  } else {
    out.entry.label = SignClass::none;
  }
  return out;
}

BadgeSpec random_badge(SignClass label, Corner corner, double radius, Polarity polarity,
                       std::uint64_t seed, int frame_width, int frame_height) {
  Rng rng(seed);
  const Rect r = corner_rect(corner, frame_width, frame_height);
  const double margin = 4.0;
  const double lo_x = r.x + radius + margin;
  const double hi_x = r.x + r.width - 1 - radius - margin;
  const double lo_y = r.y + radius + margin;
  const double hi_y = r.y + r.height - 1 - radius - margin;
  if (hi_x < lo_x || hi_y < lo_y) {
    throw Error(Errc::badge_out_of_corner, "radius too large for the corner region");
  }
  const Vec2 center{rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
  return make_badge(label, radius, center, polarity);
}

DecoySpec random_decoy(Corner corner, std::uint64_t seed, int frame_width, int frame_height) {
  Rng rng(seed);
  const Rect r = corner_rect(corner, frame_width, frame_height);
  DecoySpec d;
  d.shape = static_cast<DecoyShape>(rng.uniform_int(0, 2));
  d.half_width = rng.uniform(24.0, 45.0);
  d.half_height = rng.uniform(14.0, 30.0);
  if (d.shape == DecoyShape::ellipse) d.half_height = std::min(d.half_height, d.half_width / 1.7);
  const double margin = 4.0;
  d.half_width = std::min(d.half_width, r.width / 2.0 - margin - 1);
  d.half_height = std::min(d.half_height, r.height / 2.0 - margin - 1);
  d.center = {rng.uniform(r.x + d.half_width + margin, r.x + r.width - 1 - d.half_width - margin),
              rng.uniform(r.y + d.half_height + margin, r.y + r.height - 1 - d.half_height - margin)};
  static const Rgb kBodies[4] = {{25, 40, 110}, {120, 20, 20}, {30, 30, 30}, {245, 245, 245}};
  d.body = kBodies[rng.uniform_int(0, 3)];
  d.marks = d.body.r > 200 ? Rgb{30, 30, 30} : kLight;
  d.seed = rng.next_u64();
  return d;
}

std::vector<CorpusItem> plan_corpus(const CorpusParams& params) {
  if (params.train_per_class < 1 ||
      std::any_of(params.eval_counts.begin(), params.eval_counts.end(),
                  [](int c) { return c < 1; })) {
    throw Error(Errc::invalid_argument, "per-class sample counts must be at least 1");
  }
  if (params.train_nc < 0 || params.eval_nc < 0) {
    throw Error(Errc::invalid_argument, "N/C counts must be non-negative");
  }
  if (!(params.r_min >= kMinBadgeRadius && params.r_max >= params.r_min)) {
    throw Error(Errc::invalid_argument, "radius range must satisfy 12 <= r_min <= r_max");
  }
  std::vector<CorpusItem> items;
  std::size_t index = 0;

  auto add_sign = [&](SignClass label, int stratum, const char* split) {
    Rng rng = Rng::derive(params.seed, index);
    FrameSpec spec;
    spec.corner = static_cast<Corner>((stratum / 2) % 2);
    spec.background = static_cast<Background>((stratum / 4) % 4);
    spec.noise_sigma = noise_level(stratum, params.max_sigma);
    const auto polarity = static_cast<Polarity>(stratum % 2);
    const double radius = sweep_radius(stratum, rng.uniform(0.0, 0.1), params);
    spec.badge = random_badge(label, spec.corner, radius, polarity, rng.next_u64());
    if (rng.coin(0.5)) spec.decoy = random_decoy(opposite(spec.corner), rng.next_u64());
    spec.seed = rng.next_u64();
    ManifestEntry entry;
    entry.path = frame_name(index);
    entry.label = label;
    entry.circle = Circle{spec.badge->center.x, spec.badge->center.y, spec.badge->radius};
    entry.corner = spec.corner;
    entry.seed = spec.seed;
    entry.split = split;
    items.push_back({spec, entry});
    ++index;
  };

  auto add_none = [&](int stratum, const char* split) {
    Rng rng = Rng::derive(params.seed, index);
    FrameSpec spec;
    spec.corner = static_cast<Corner>(stratum % 2);
    spec.background = static_cast<Background>((stratum / 2) % 4);
    spec.noise_sigma = noise_level(stratum, params.max_sigma);
    if (stratum % 3 != 2) spec.decoy = random_decoy(spec.corner, rng.next_u64());
    spec.seed = rng.next_u64();
    ManifestEntry entry;
    entry.path = frame_name(index);
    entry.label = SignClass::none;
    entry.corner = spec.corner;
    entry.seed = spec.seed;
    entry.split = split;
    items.push_back({spec, entry});
    ++index;
  };

  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < params.train_per_class; ++i) add_sign(static_cast<SignClass>(c), i, "train");
  }
  for (int i = 0; i < params.train_nc; ++i) add_none(i, "train");
  // Eval strata continue past the training ones so the two splits do not
  // repeat the same radius/polarity/background combinations in lockstep.
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < params.eval_counts[c]; ++i) {
      add_sign(static_cast<SignClass>(c), i + params.train_per_class, "eval");
    }
  }
  for (int i = 0; i < params.eval_nc; ++i) add_none(i + params.train_nc, "eval");
  return items;
}

CorpusManifest generate_corpus(const CorpusParams& params, const std::filesystem::path& out_dir) {
  const auto items = plan_corpus(params);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::io_failure, "cannot create " + out_dir.string());
  CorpusManifest manifest;
  for (const CorpusItem& item : items) {
    const RenderedFrame frame = render_frame(item.spec);
    save_pnm(out_dir / item.entry.path, frame.image);
    manifest.push_back(item.entry);
  }
  write_manifest(out_dir / "manifest.jsonl", manifest);
  return manifest;
}

std::string manifest_line(const ManifestEntry& entry) {
  json j;
  j["path"] = entry.path;
  j["label"] = to_string(entry.label);
  if (entry.circle) {
    j["a0"] = entry.circle->a0;
    j["b0"] = entry.circle->b0;
    j["r0"] = entry.circle->r0;
  } else {
    j["a0"] = nullptr;
    j["b0"] = nullptr;
    j["r0"] = nullptr;
  }
  j["corner"] = entry.corner ? json(to_string(*entry.corner)) : json(nullptr);
  j["seed"] = entry.seed;
  j["split"] = entry.split;
  return j.dump();
}

ManifestEntry parse_manifest_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("bad manifest line: ") + e.what());
  }
  ManifestEntry entry;
  try {
    entry.path = j.at("path").get<std::string>();
    entry.label = sign_class_from_string(j.at("label").get<std::string>());
    if (j.contains("a0") && !j["a0"].is_null()) {
      entry.circle = Circle{j.at("a0").get<double>(), j.at("b0").get<double>(),
                            j.at("r0").get<double>()};
    }
    if (j.contains("corner") && !j["corner"].is_null()) {
      entry.corner = corner_from_string(j["corner"].get<std::string>());
    }
    entry.seed = j.value("seed", std::uint64_t{0});
    entry.split = j.value("split", std::string());
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("bad manifest line: ") + e.what());
  }
  return entry;
}

void write_manifest(const std::filesystem::path& path, const CorpusManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_failure, "cannot create " + path.string());
  for (const ManifestEntry& entry : manifest) out << manifest_line(entry) << '\n';
  if (!out) throw Error(Errc::io_failure, "write failed for " + path.string());
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  CorpusManifest manifest;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    manifest.push_back(parse_manifest_line(line));
  }
  return manifest;
}

}  // namespace agesign
