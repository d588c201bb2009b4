#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "agesign/pipeline.hpp"

namespace agesign {

/// Time-ordered frames. Frames are produced on demand so long schedules
/// never need to be resident.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::size_t size() const = 0;
  virtual double timestamp(std::size_t index) const = 0;
  virtual ColorImage frame(std::size_t index) const = 0;
};

/// JSON-lines schedule: {"t": seconds, "path": "frame.ppm"} per line, paths
/// relative to the schedule file.
class ScheduleFileSource final : public FrameSource {
 public:
  explicit ScheduleFileSource(const std::filesystem::path& schedule);
  std::size_t size() const override { return entries_.size(); }
  double timestamp(std::size_t index) const override { return entries_.at(index).t; }
  ColorImage frame(std::size_t index) const override;

 private:
  struct Entry {
    double t;
    std::filesystem::path path;
  };
  std::vector<Entry> entries_;
};

struct TimedFrameSpec {
  double t = 0.0;
  FrameSpec spec;
};

class SyntheticSource final : public FrameSource {
 public:
  explicit SyntheticSource(std::vector<TimedFrameSpec> frames) : frames_(std::move(frames)) {}
  std::size_t size() const override { return frames_.size(); }
  double timestamp(std::size_t index) const override { return frames_.at(index).t; }
  ColorImage frame(std::size_t index) const override {
    return render_frame(frames_.at(index).spec).image;
  }
  const TimedFrameSpec& at(std::size_t index) const { return frames_.at(index); }

 private:
  std::vector<TimedFrameSpec> frames_;
};

class InMemorySource final : public FrameSource {
 public:
  void add(double t, ColorImage frame) { frames_.push_back({t, std::move(frame)}); }
  std::size_t size() const override { return frames_.size(); }
  double timestamp(std::size_t index) const override { return frames_.at(index).first; }
  ColorImage frame(std::size_t index) const override { return frames_.at(index).second; }

 private:
  std::vector<std::pair<double, ColorImage>> frames_;
};

struct StreamEvent {
  double t = 0.0;
  Detection detection;
  double processing_seconds = 0.0;
  bool deadline_met = true;
};

/// Samples the source at t = 0, P, 2P, ... up to its last timestamp, taking
/// the latest frame at or before each instant. Each sample is processed to
/// completion before the next one is taken.
std::vector<StreamEvent> run_stream(const FrameSource& source, const PipelineConfig& cfg,
                                    const MlpModel& model,
                                    const std::function<void(const StreamEvent&)>& on_event = {});

/// {t, label, a0, b0, r0, corner, ms, deadline_met}
std::string event_json(const StreamEvent& event);

struct SignWindow {
  double start = 0.0;
  double duration = 10.0;
  SignClass label = SignClass::age7;
};

struct ScheduleParams {
  double duration = 120.0;
  double fps = 25.0;
  std::vector<SignWindow> windows;
  double noise_sigma = 4.0;
  double radius = 30.0;
  std::uint64_t seed = 1;
};

/// One frame spec per 1/fps tick; frames inside a window carry that
/// window's badge (fixed geometry per window, fresh noise per frame).
std::vector<TimedFrameSpec> plan_schedule(const ScheduleParams& params);

/// Writes one PPM per distinct scene plus schedule.jsonl referencing them at
/// the requested frame rate. Returns the schedule path.
std::filesystem::path write_schedule(const ScheduleParams& params,
                                     const std::filesystem::path& out_dir);

}  // namespace agesign
