#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "agesign/circle_detect.hpp"
#include "agesign/glyphs.hpp"
#include "agesign/mlp.hpp"
#include "agesign/raster.hpp"

namespace agesign {

inline constexpr int kFrameWidth = 720;
inline constexpr int kFrameHeight = 576;
inline constexpr double kMinBadgeRadius = 12.0;

enum class Polarity { positive, negative };
enum class Background { flat, gradient, seeded_noise, checker };
enum class DecoyShape { rectangle, ellipse, triangle };

const char* to_string(Background background) noexcept;
const char* to_string(Polarity polarity) noexcept;

/// Positive polarity: light ring and glyphs on a dark disc. Negative swaps
/// the two colors.
struct BadgeSpec {
  SignClass label = SignClass::age7;
  double radius = 30.0;
  Vec2 center;  // frame coordinates
  Polarity polarity = Polarity::positive;
  double ring_thickness = 3.0;
  double stroke_width = 3.0;
};

/// Ring thickness and stroke width default to 10% of the radius (min 2 px).
BadgeSpec make_badge(SignClass label, double radius, Vec2 center,
                     Polarity polarity = Polarity::positive);

/// A non-sign closed object (channel-logo stand-in) with bar marks inside.
struct DecoySpec {
  DecoyShape shape = DecoyShape::rectangle;
  Vec2 center;
  double half_width = 30.0;
  double half_height = 20.0;
  Rgb body;
  Rgb marks;
  std::uint64_t seed = 0;
};

struct FrameSpec {
  int width = kFrameWidth;
  int height = kFrameHeight;
  Background background = Background::flat;
  std::optional<BadgeSpec> badge;
  std::optional<DecoySpec> decoy;
  Corner corner = Corner::upper_left;  // corner holding the badge (or decoy)
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct ManifestEntry {
  std::string path;
  SignClass label = SignClass::none;
  std::optional<Circle> circle;
  std::optional<Corner> corner;
  std::uint64_t seed = 0;
  std::string split;  // "train" or "eval"
};

using CorpusManifest = std::vector<ManifestEntry>;

struct BadgeRender {
  BinaryImage mask;  // 1 = light pixel; outside the disc takes the disc-fill value
  Circle circle;     // in mask coordinates
  Point origin;      // frame position of mask pixel (0, 0)
};

/// Pixel class of a badge at a continuous position.
enum class BadgePixel { outside, fill, ink };
BadgePixel badge_pixel(const BadgeSpec& spec, Vec2 p);

BadgeRender render_badge(const BadgeSpec& spec);

/// The badge's glyph region rendered straight into the 40x80 crop geometry
/// (ink white, ring removed) and thinned: what glyph_crop should produce.
BinaryImage reference_glyph(const BadgeSpec& spec, double keep_fraction = 0.75);

struct RenderedFrame {
  ColorImage image;
  ManifestEntry entry;
};

RenderedFrame render_frame(const FrameSpec& spec);

/// Throws badge_out_of_corner when the badge (or decoy) leaves its corner
/// region at the default 25% fractions.
void validate_frame_spec(const FrameSpec& spec);

struct CorpusParams {
  int train_per_class = 18;
  std::array<int, 3> eval_counts = {43, 27, 41};
  int train_nc = 18;
  int eval_nc = 0;
  double r_min = 20.0;
  double r_max = 40.0;
  double max_sigma = 8.0;
  std::uint64_t seed = 1;
};

struct CorpusItem {
  FrameSpec spec;
  ManifestEntry entry;
};

/// Frame specs for the whole corpus. Item k draws from an RNG stream derived
/// from (seed, k); polarity, corner, background, noise level and radius are
/// swept deterministically within each class.
std::vector<CorpusItem> plan_corpus(const CorpusParams& params);

/// Renders the corpus into `out_dir` (PPM frames plus manifest.jsonl).
CorpusManifest generate_corpus(const CorpusParams& params, const std::filesystem::path& out_dir);

std::string manifest_line(const ManifestEntry& entry);
ManifestEntry parse_manifest_line(const std::string& line);
void write_manifest(const std::filesystem::path& path, const CorpusManifest& manifest);
CorpusManifest read_manifest(const std::filesystem::path& path);

/// Badge sizes and positions for random sign placement inside a corner.
BadgeSpec random_badge(SignClass label, Corner corner, double radius, Polarity polarity,
                       std::uint64_t seed, int frame_width = kFrameWidth,
                       int frame_height = kFrameHeight);
DecoySpec random_decoy(Corner corner, std::uint64_t seed, int frame_width = kFrameWidth,
                       int frame_height = kFrameHeight);

}  // namespace agesign
