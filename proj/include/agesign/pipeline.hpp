#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agesign/circle_detect.hpp"
#include "agesign/features.hpp"
#include "agesign/mlp.hpp"
#include "agesign/preprocess.hpp"
#include "agesign/raster.hpp"
#include "agesign/synth.hpp"

namespace agesign {

enum class Detector { cht, ce };
enum class PointSource { boundary, filled };

const char* to_string(Detector detector) noexcept;
Detector detector_from_string(const std::string& text);

struct PipelineConfig {
  Detector detector = Detector::ce;
  PointSource ce_points = PointSource::boundary;
  double corner_fraction_w = 0.25;
  double corner_fraction_h = 0.25;
  EdgeParams edge;
  std::optional<HoughParams> hough;  // unset: default_hough_params(crop)
  double min_area_fraction = 0.005;
  // A detected circle is accepted only if it lies inside the crop (1 px
  // slack) and at least this fraction of the object's boundary points is
  // within 2 px of it. Zero disables the check.
  double min_circle_support = 0.75;
  double glyph_keep_fraction = 0.75;
  // Subtracted from r0 before the glyph crop: the filled object ends about
  // one pixel outside the badge edge because the Sobel band straddles it.
  double glyph_radius_inset = 0.0;
  double reject_threshold = 0.5;
  double sampling_period = 4.0;
  double sign_duration = 10.0;

  void validate() const;
};

struct Detection {
  SignClass label = SignClass::none;
  std::optional<Circle> circle;  // frame coordinates
  std::optional<Corner> corner;
  std::array<double, kClassCount> activations{};
  double elapsed = 0.0;  // seconds
};

/// Everything the vision stages produce for one corner, before the MLP.
struct CornerAnalysis {
  Corner corner = Corner::upper_left;
  Rect region;
  std::optional<Circle> circle;  // crop coordinates
  std::optional<FeatureVector> features;
  std::string failure;           // reason when no features were produced
  double detect_seconds = 0.0;   // crop + grayscale + preprocessing + detector
  double total_seconds = 0.0;    // detect_seconds + glyph crop + features
};

struct CornerDebug {
  GrayImage gray;
  PreprocessStages stages;
  std::optional<BinaryImage> selected;
  std::optional<BinaryImage> glyph;
};

/// Fraction of points within `band` px of the circle.
double circle_support(const Circle& c, std::span<const Point> points, double band = 2.0);

/// Circle lies inside a width x height crop (1 px slack) and is supported by
/// at least `min_support` of the boundary points.
bool plausible_circle(const Circle& c, std::span<const Point> boundary, int width, int height,
                      double min_support);

CornerAnalysis analyze_corner(const ColorImage& frame, const CropRegion& region,
                              const PipelineConfig& cfg, CornerDebug* debug = nullptr);

struct CornerResult {
  CornerAnalysis analysis;
  Detection detection;
};

struct FrameResult {
  std::array<CornerResult, 2> corners;
  Detection detection;    // frame-level decision
  bool conflict = false;  // both corners claimed a sign
  double detect_seconds = 0.0;
  double total_seconds = 0.0;
};

/// Both corners through the full chain; the frame label is the single
/// non-N/C corner, or N/C when none or both claim a sign.
FrameResult process_frame(const ColorImage& frame, const PipelineConfig& cfg,
                          const MlpModel& model,
                          std::array<CornerDebug, 2>* debug = nullptr);

using FrameLoader = std::function<ColorImage(const ManifestEntry&)>;

/// Loader that reads entry.path relative to a corpus directory.
FrameLoader directory_loader(const std::string& corpus_dir);

/// Loader that re-renders planned corpus items (matched by path) in memory.
FrameLoader planned_loader(std::vector<CorpusItem> items);

/// Corner used for a training sample: the manifest corner, else upper-left.
Corner sample_corner(const ManifestEntry& entry);

struct TrainingSet {
  std::vector<Sample> samples;
  std::vector<SignClass> labels;
  std::vector<std::string> skipped;  // entry paths with no usable features
};

/// Features of every train-split entry's sample corner, labeled with the
/// manifest class. The circle-support check is skipped here so that
/// negatives still yield features.
TrainingSet collect_training_set(const CorpusManifest& manifest, const FrameLoader& loader,
                                 const PipelineConfig& cfg);

std::string detection_json(const Detection& detection);

}  // namespace agesign
