#include "agesign/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>

#include "json.hpp"

#include "agesign/pnm.hpp"

namespace agesign {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

double circle_support(const Circle& c, std::span<const Point> points, double band) {
  if (points.empty()) return 0.0;
  std::size_t near = 0;
  for (const Point& p : points) {
    if (std::abs(std::hypot(p.x - c.a0, p.y - c.b0) - c.r0) <= band) ++near;
  }
  return static_cast<double>(near) / static_cast<double>(points.size());
}

bool plausible_circle(const Circle& c, std::span<const Point> boundary, int width, int height,
                      double min_support) {
  const double slack = 1.0;
  if (c.a0 - c.r0 < -slack || c.b0 - c.r0 < -slack || c.a0 + c.r0 > width - 1 + slack ||
      c.b0 + c.r0 > height - 1 + slack) {
    return false;
  }
  return circle_support(c, boundary) >= min_support;
}

const char* to_string(Detector detector) noexcept {
  return detector == Detector::cht ? "cht" : "ce";
}

Detector detector_from_string(const std::string& text) {
  if (text == "cht") return Detector::cht;
  if (text == "ce") return Detector::ce;
  throw Error(Errc::invalid_argument, "unknown detector '" + text + "' (use cht or ce)");
}

void PipelineConfig::validate() const {
  if (!(sampling_period > 0.0)) throw Error(Errc::invalid_argument, "sampling period must be > 0");
  if (!(sign_duration > 0.0)) throw Error(Errc::invalid_argument, "sign duration must be > 0");
  if (!(edge.threshold_fraction > 0.0 && edge.threshold_fraction <= 1.0)) {
    throw Error(Errc::invalid_argument, "edge threshold fraction must lie in (0, 1]");
  }
  if (!(corner_fraction_w > 0.0 && corner_fraction_w <= 1.0 && corner_fraction_h > 0.0 &&
        corner_fraction_h <= 1.0)) {
    throw Error(Errc::invalid_argument, "corner fractions must lie in (0, 1]");
  }
  if (!(min_area_fraction >= 0.0 && min_area_fraction < 1.0)) {
    throw Error(Errc::invalid_argument, "min-area fraction must lie in [0, 1)");
  }
  if (!(min_circle_support >= 0.0 && min_circle_support <= 1.0)) {
    throw Error(Errc::invalid_argument, "circle support must lie in [0, 1]");
  }
  if (!(glyph_keep_fraction > 0.0 && glyph_keep_fraction <= 1.0)) {
    throw Error(Errc::invalid_argument, "glyph keep fraction must lie in (0, 1]");
  }
  if (hough && (hough->r_min < 1 || hough->r_step < 1 || hough->r_max < hough->r_min)) {
    throw Error(Errc::invalid_argument, "invalid Hough radius range");
  }
}

CornerAnalysis analyze_corner(const ColorImage& frame, const CropRegion& region,
                              const PipelineConfig& cfg, CornerDebug* debug) {
  CornerAnalysis out;
  out.corner = region.corner;
  out.region = region.rect;
  const auto start = Clock::now();
  GrayImage gray = to_grayscale(frame, region.rect);
  std::optional<CandidateObject> candidate;
  try {
    const auto min_area = static_cast<std::size_t>(
        std::max(1.0, std::ceil(cfg.min_area_fraction * static_cast<double>(gray.size()))));
    candidate = extract_candidate(gray, cfg.edge, min_area, debug ? &debug->stages : nullptr);
    if (cfg.detector == Detector::ce) {
      const auto points = cfg.ce_points == PointSource::boundary
                              ? candidate->boundary
                              : foreground_points(candidate->mask);
      out.circle = ce_fit(points).circle;
    } else {
      const HoughParams params =
          cfg.hough.value_or(default_hough_params(gray.width(), gray.height()));
      out.circle = cht_unknown_radius(candidate->boundary, params, gray.width(), gray.height());
    }
  } catch (const Error& e) {
    out.failure = e.what();
  }
  out.detect_seconds = seconds_since(start);

  if (out.circle && cfg.min_circle_support > 0 &&
      !plausible_circle(*out.circle, candidate->boundary, gray.width(), gray.height(),
                        cfg.min_circle_support)) {
    out.failure = "object is not a circle inside the crop";
  } else if (out.circle) {
    try {
      Circle glyph_circle = *out.circle;
      glyph_circle.r0 -= cfg.glyph_radius_inset;
      const BinaryImage glyph_source = isolate_glyph(binarize_badge(gray, glyph_circle),
                                                     glyph_circle, cfg.glyph_keep_fraction);
      const GlyphCrop glyph = glyph_crop(glyph_source, glyph_circle);
      out.features = extract_features(glyph);
      if (debug) debug->glyph = glyph.mask;
    } catch (const Error& e) {
      out.failure = e.what();
    }
  }
  out.total_seconds = seconds_since(start);
  if (debug) {
    debug->gray = std::move(gray);
    if (candidate) debug->selected = candidate->mask;
  }
  return out;
}

FrameResult process_frame(const ColorImage& frame, const PipelineConfig& cfg,
                          const MlpModel& model, std::array<CornerDebug, 2>* debug) {
  cfg.validate();
  const auto [left, right] =
      corner_regions(frame.width(), frame.height(), cfg.corner_fraction_w, cfg.corner_fraction_h);
  const std::array<CropRegion, 2> regions = {left, right};
  FrameResult result;
  int claims = 0;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto start = Clock::now();
    CornerResult& corner = result.corners[i];
    corner.analysis = analyze_corner(frame, regions[i], cfg, debug ? &(*debug)[i] : nullptr);
    Detection& d = corner.detection;
    d.corner = regions[i].corner;
    if (corner.analysis.circle) {
      const Circle& c = *corner.analysis.circle;
      d.circle = Circle{c.a0 + regions[i].rect.x, c.b0 + regions[i].rect.y, c.r0};
    }
    if (corner.analysis.features) {
      const Classification cls = classify(model, *corner.analysis.features, cfg.reject_threshold);
      d.label = cls.label;
      d.activations = cls.activations;
    }
    d.elapsed = seconds_since(start);
    result.detect_seconds += corner.analysis.detect_seconds;
    result.total_seconds += d.elapsed;
    if (d.label != SignClass::none) ++claims;
  }
  if (claims == 1) {
    for (const CornerResult& c : result.corners) {
      if (c.detection.label != SignClass::none) result.detection = c.detection;
    }
  } else {
    result.conflict = claims > 1;
    result.detection.label = SignClass::none;
  }
  result.detection.elapsed = result.total_seconds;
  return result;
}

FrameLoader directory_loader(const std::string& corpus_dir) {
  const std::filesystem::path root(corpus_dir);
  return [root](const ManifestEntry& entry) { return load_color(root / entry.path); };
}

FrameLoader planned_loader(std::vector<CorpusItem> items) {
  auto by_path = std::make_shared<std::map<std::string, FrameSpec>>();
  for (CorpusItem& item : items) (*by_path)[item.entry.path] = std::move(item.spec);
  return [by_path](const ManifestEntry& entry) {
    const auto it = by_path->find(entry.path);
    if (it == by_path->end()) throw Error(Errc::io_failure, "no planned frame " + entry.path);
    return render_frame(it->second).image;
  };
}

Corner sample_corner(const ManifestEntry& entry) {
  return entry.corner.value_or(Corner::upper_left);
}

TrainingSet collect_training_set(const CorpusManifest& manifest, const FrameLoader& loader,
                                 const PipelineConfig& config) {
  config.validate();
  // negatives are mostly rejected by the circle check at inference time;
  // training still needs their features
  PipelineConfig cfg = config;
  cfg.min_circle_support = 0.0;
  TrainingSet set;
  for (const ManifestEntry& entry : manifest) {
    if (entry.split != "train") continue;
    const ColorImage frame = loader(entry);
    const auto [left, right] = corner_regions(frame.width(), frame.height(),
                                              cfg.corner_fraction_w, cfg.corner_fraction_h);
    const CropRegion& region = sample_corner(entry) == Corner::upper_left ? left : right;
    const CornerAnalysis analysis = analyze_corner(frame, region, cfg);
    if (!analysis.features) {
      set.skipped.push_back(entry.path);
      continue;
    }
    set.samples.push_back(make_sample(*analysis.features, entry.label));
    set.labels.push_back(entry.label);
  }
  if (set.samples.empty()) throw Error(Errc::empty_split, "no usable training frames");
  return set;
}

std::string detection_json(const Detection& detection) {
  nlohmann::json j;
  j["label"] = to_string(detection.label);
  if (detection.circle && detection.label != SignClass::none) {
    j["a0"] = detection.circle->a0;
    j["b0"] = detection.circle->b0;
    j["r0"] = detection.circle->r0;
  } else {
    j["a0"] = nullptr;
    j["b0"] = nullptr;
    j["r0"] = nullptr;
  }
  j["corner"] = detection.corner && detection.label != SignClass::none
                    ? nlohmann::json(to_string(*detection.corner))
                    : nlohmann::json(nullptr);
  j["activations"] = detection.activations;
  j["ms"] = detection.elapsed * 1000.0;
  return j.dump();
}

}  // namespace agesign
