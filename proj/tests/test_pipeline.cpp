#include "doctest.h"

#include <filesystem>
#include <map>
#include <unistd.h>

#include "agesign/annotate.hpp"
#include "agesign/benchmark.hpp"
#include "agesign/pipeline.hpp"
#include "agesign/stream.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace agesign;
using namespace agesign::test;
namespace fs = std::filesystem;

namespace {

struct Corpus {
  std::vector<CorpusItem> items;
  CorpusManifest manifest;
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus out;
    out.items = plan_corpus(CorpusParams{});
    for (const CorpusItem& item : out.items) out.manifest.push_back(item.entry);
    return out;
  }();
  return c;
}

// One model per detector, trained on that detector's features.
const MlpModel& model_for(Detector detector) {
  static std::map<Detector, MlpModel> cache;
  auto it = cache.find(detector);
  if (it == cache.end()) {
    PipelineConfig cfg;
    cfg.detector = detector;
    const TrainingSet set = collect_training_set(corpus().manifest, planned_loader(corpus().items), cfg);
    const TrainResult result = mlp_train(set.samples, TrainConfig{});
    REQUIRE(result.converged);
    it = cache.emplace(detector, result.model).first;
  }
  return it->second;
}

PipelineConfig config(Detector detector) {
  PipelineConfig cfg;
  cfg.detector = detector;
  return cfg;
}

ColorImage badge_frame(SignClass label, Corner corner, double r, Polarity pol, std::uint64_t seed,
                       double sigma = 4) {
  FrameSpec spec;
  spec.background = Background::gradient;
  spec.corner = corner;
  spec.noise_sigma = sigma;
  spec.seed = seed;
  spec.badge = random_badge(label, corner, r, pol, seed + 1);
  return render_frame(spec).image;
}

ColorImage blank_frame(std::uint64_t seed) {
  FrameSpec spec;
  spec.background = Background::flat;
  spec.noise_sigma = 4;
  spec.seed = seed;
  return render_frame(spec).image;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(PipelineConfig{}.validate());
  PipelineConfig cfg;
  cfg.sampling_period = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.edge.threshold_fraction = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.corner_fraction_w = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.hough = HoughParams{10, 5, 1};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.min_circle_support = 2;
  CHECK_THROWS_AS(cfg.validate(), Error);

  CHECK(detector_from_string("cht") == Detector::cht);
  CHECK(std::string(to_string(Detector::ce)) == "ce");
  CHECK_THROWS_AS(detector_from_string("hough"), Error);
}

TEST_CASE("circle plausibility") {
  const auto ring = boundary_of(disc_mask(100, 100, 50, 50, 20));
  CHECK(circle_support(Circle{50, 50, 20}, ring) == doctest::Approx(1.0));
  CHECK(circle_support(Circle{50, 50, 30}, ring) == 0.0);
  CHECK(circle_support(Circle{50, 50, 20}, {}) == 0.0);
  CHECK(plausible_circle(Circle{50, 50, 20}, ring, 100, 100, 0.75));
  CHECK_FALSE(plausible_circle(Circle{50, 50, 20}, ring, 60, 100, 0.75));  // leaves the crop
  CHECK_FALSE(plausible_circle(Circle{50, 50, 25}, ring, 100, 100, 0.75));

  BinaryImage square(100, 100, 0);
  for (int y = 20; y < 80; ++y)
    for (int x = 20; x < 80; ++x) square(x, y) = 1;
  const auto sq = boundary_of(square);
  CHECK_FALSE(plausible_circle(ce_fit(sq).circle, sq, 100, 100, 0.75));
}

TEST_CASE("process frame") {
  const MlpModel& ce_model = model_for(Detector::ce);

  SUBCASE("18+ in the upper right") {
    FrameSpec spec;
    spec.background = Background::seeded_noise;
    spec.corner = Corner::upper_right;
    spec.noise_sigma = 4;
    spec.seed = 77;
    spec.badge = random_badge(SignClass::age18, Corner::upper_right, 32, Polarity::positive, 78);
    const RenderedFrame frame = render_frame(spec);
    const FrameResult r = process_frame(frame.image, config(Detector::ce), ce_model);
    CHECK(r.detection.label == SignClass::age18);
    CHECK(r.detection.corner == Corner::upper_right);
    REQUIRE(r.detection.circle);
    const Circle& truth = *frame.entry.circle;
    CHECK(std::hypot(r.detection.circle->a0 - truth.a0, r.detection.circle->b0 - truth.b0) <= 2.0);
    CHECK_FALSE(r.conflict);
    CHECK(r.detect_seconds <= r.total_seconds);

    const auto j = nlohmann::json::parse(detection_json(r.detection));
    CHECK(j["label"] == "18+");
    CHECK(j["corner"] == "upper-right");
    CHECK(j["activations"].size() == 4);
  }

  SUBCASE("badge-free frame") {
    std::array<CornerDebug, 2> debug;
    const FrameResult r = process_frame(blank_frame(3), config(Detector::ce), ce_model, &debug);
    CHECK(r.detection.label == SignClass::none);
    CHECK_FALSE(r.conflict);
    for (const CornerResult& c : r.corners) {
      CHECK(c.detection.label == SignClass::none);
      CHECK_FALSE(c.analysis.failure.empty());
    }
    CHECK(debug[0].gray.width() == 180);
    const auto j = nlohmann::json::parse(detection_json(r.detection));
    CHECK(j["label"] == "N/C");
    CHECK(j["a0"].is_null());
    CHECK(j["corner"].is_null());
  }

  SUBCASE("deterministic apart from timing") {
    const ColorImage img = badge_frame(SignClass::age7, Corner::upper_left, 28, Polarity::negative, 5);
    const FrameResult a = process_frame(img, config(Detector::ce), ce_model);
    const FrameResult b = process_frame(img, config(Detector::ce), ce_model);
    CHECK(a.detection.label == b.detection.label);
    CHECK(a.detection.circle == b.detection.circle);
    CHECK(a.detection.activations == b.detection.activations);
  }
}

TEST_CASE("training error falls over the first 20 epochs") {
  PipelineConfig cfg;
  const TrainingSet set = collect_training_set(corpus().manifest, planned_loader(corpus().items), cfg);
  CHECK(set.samples.size() == 72);
  TrainConfig tc;
  tc.learning_rate = 0.5;
  tc.max_epochs = 20;
  tc.target_mse = 1e-9;
  const TrainResult r = mlp_train(set.samples, tc);
  REQUIRE(r.error_curve.size() == 21);
  for (std::size_t i = 1; i < r.error_curve.size(); ++i) CHECK(r.error_curve[i] < r.error_curve[i - 1]);

  CorpusManifest eval_only;
  for (const ManifestEntry& e : corpus().manifest)
    if (e.split == "eval") eval_only.push_back(e);
  try {
    collect_training_set(eval_only, planned_loader(corpus().items), cfg);
    FAIL("expected empty_split");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_split);
  }
}

TEST_CASE("stream sampling") {
  const MlpModel& model = model_for(Detector::ce);
  const PipelineConfig cfg = config(Detector::ce);

  CHECK(run_stream(InMemorySource{}, cfg, model).empty());

  SUBCASE("five blank frames") {
    InMemorySource src;
    for (int i = 0; i < 5; ++i) src.add(4.0 * i, blank_frame(static_cast<std::uint64_t>(i)));
    int callbacks = 0;
    const auto events = run_stream(src, cfg, model, [&](const StreamEvent&) { ++callbacks; });
    REQUIRE(events.size() == 5);
    CHECK(callbacks == 5);
    for (std::size_t i = 0; i < events.size(); ++i) {
      CHECK(events[i].t == 4.0 * static_cast<double>(i));
      CHECK(events[i].detection.label == SignClass::none);
      CHECK(events[i].deadline_met == (events[i].processing_seconds < 4.0));
    }
    const auto j = nlohmann::json::parse(event_json(events[0]));
    for (const char* key : {"t", "label", "a0", "b0", "r0", "corner", "ms", "deadline_met"}) CHECK(j.contains(key));
  }

  SUBCASE("latest frame at or before each instant") {
    // 1 fps, sign on air during [10, 20)
    const ColorImage sign = badge_frame(SignClass::age13, Corner::upper_left, 30, Polarity::positive, 11);
    const ColorImage blank = blank_frame(12);
    InMemorySource src;
    src.add(0.5, blank);  // nothing on air at t = 0
    for (int t = 1; t <= 30; ++t) src.add(t, t >= 10 && t < 20 ? sign : blank);
    const auto events = run_stream(src, cfg, model);
    std::vector<double> times;
    for (const StreamEvent& e : events) times.push_back(e.t);
    CHECK(times == std::vector<double>{4, 8, 12, 16, 20, 24, 28});
    for (const StreamEvent& e : events) {
      const bool on_air = e.t >= 10 && e.t < 20;
      CHECK(e.detection.label == (on_air ? SignClass::age13 : SignClass::none));
    }
  }

  InMemorySource backwards;
  backwards.add(2, blank_frame(1));
  backwards.add(1, blank_frame(2));
  CHECK_THROWS_AS(run_stream(backwards, cfg, model), Error);
}

TEST_CASE("schedules") {
  ScheduleParams p;
  p.duration = 12;
  p.fps = 2;
  p.windows = {{2, 5, SignClass::age18}};
  const auto frames = plan_schedule(p);
  REQUIRE(frames.size() == 25);
  for (const TimedFrameSpec& f : frames) {
    const bool in_window = f.t >= 2 && f.t < 7;
    CHECK(f.spec.badge.has_value() == in_window);
    if (in_window) CHECK(f.spec.badge->label == SignClass::age18);
  }
  CHECK(frames[0].spec.seed != frames[1].spec.seed);

  const fs::path dir = fs::temp_directory_path() / ("agesign_sched_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const fs::path path = write_schedule(p, dir);
  const ScheduleFileSource src(path);
  CHECK(src.size() == 25);
  CHECK(src.timestamp(24) == 12.0);
  CHECK(src.frame(6).width() == 720);
  const auto events = run_stream(src, config(Detector::ce), model_for(Detector::ce));
  REQUIRE(events.size() == 4);  // t = 0, 4, 8, 12
  CHECK(events[1].detection.label == SignClass::age18);
  CHECK(events[0].detection.label == SignClass::none);
  fs::remove_all(dir);

  ScheduleParams bad = p;
  bad.windows[0].label = SignClass::none;
  CHECK_THROWS_AS(plan_schedule(bad), Error);
  CHECK_THROWS_AS(ScheduleFileSource("/nonexistent/schedule.jsonl"), Error);
}

TEST_CASE("benchmark") {
  CorpusParams small;
  small.train_per_class = 1;
  small.train_nc = 1;
  small.eval_counts = {2, 2, 2};
  small.eval_nc = 1;
  small.seed = 9;
  const auto items = plan_corpus(small);
  CorpusManifest manifest;
  for (const CorpusItem& item : items) manifest.push_back(item.entry);

  const MlpModel& model = model_for(Detector::ce);
  const BenchmarkReport a = run_benchmark(manifest, planned_loader(items), PipelineConfig{}, model);
  REQUIRE(a.rows.size() == 8);
  CHECK(a.frames.size() == 14);
  CHECK(a.rows[0].detector == Detector::cht);
  CHECK(a.rows[4].detector == Detector::ce);
  CHECK(a.rows[3].label == SignClass::none);
  for (const BenchmarkRow& row : a.rows) {
    CHECK(row.accuracy_pct >= 0);
    CHECK(row.accuracy_pct <= 100);
    CHECK(row.std_seconds >= 0);
  }
  const BenchmarkReport b = run_benchmark(manifest, planned_loader(items), PipelineConfig{}, model);
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].accuracy_pct == b.rows[i].accuracy_pct);

  const std::string csv = benchmark_csv(a.rows);
  CHECK(csv.rfind("detector,class,n,mean_s,std_s,accuracy_pct\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);

  try {
    run_benchmark(manifest, planned_loader(items), PipelineConfig{}, model, {Detector::ce}, "holdout");
    FAIL("expected empty_split");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_split);
  }
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}

TEST_SUITE("cross-detector") {
TEST_CASE("both detectors give the same label on every eval frame") {
  const MlpModel& ce_model = model_for(Detector::ce);
  const MlpModel& cht_model = model_for(Detector::cht);
  int compared = 0, agreed = 0;
  for (const CorpusItem& item : corpus().items) {
    if (item.entry.split != "eval") continue;
    const ColorImage img = render_frame(item.spec).image;
    const Detection ce = process_frame(img, config(Detector::ce), ce_model).detection;
    const Detection cht = process_frame(img, config(Detector::cht), cht_model).detection;
    ++compared;
    INFO(item.entry.path << " ce=" << std::string(to_string(ce.label)) << " cht=" << std::string(to_string(cht.label)));
    CHECK(ce.label == cht.label);
    if (ce.label != cht.label) continue;
    ++agreed;
    if (ce.label != SignClass::none) {
      CHECK(std::hypot(ce.circle->a0 - cht.circle->a0, ce.circle->b0 - cht.circle->b0) <= 2.0);
    }
  }
  MESSAGE(agreed << " of " << compared << " eval frames agree");
  CHECK(compared == 111);
}
}

TEST_CASE("annotation") {
  const ColorImage frame(200, 150, Rgb{90, 90, 90});
  Detection nc;
  CHECK(annotate_output(frame, nc) == frame);

  Detection d;
  d.label = SignClass::age7;
  d.circle = Circle{80.3, 60.7, 25.4};
  d.corner = Corner::upper_left;
  const ColorImage out = annotate_output(frame, d);
  CHECK_FALSE(out == frame);
  int outline = 0;
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) {
      if (!(out(x, y) == kOutlineColor)) continue;
      ++outline;
      CHECK(std::abs(std::hypot(x - 80.3, y - 60.7) - 25.4) <= 1.0);
    }
  CHECK(outline > 100);
  CHECK(out(80, 61) == kCrosshairColor);
  CHECK(annotate_output(out, d) == out);
}
