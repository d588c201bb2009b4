#include "agesign/stream.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "json.hpp"

#include "agesign/pnm.hpp"
#include "agesign/rng.hpp"

namespace agesign {

ScheduleFileSource::ScheduleFileSource(const std::filesystem::path& schedule) {
  std::ifstream in(schedule);
  if (!in) throw Error(Errc::io_failure, "cannot open schedule " + schedule.string());
  const auto base = schedule.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      entries_.push_back({j.at("t").get<double>(), base / j.at("path").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::invalid_argument,
                  "schedule line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

ColorImage ScheduleFileSource::frame(std::size_t index) const {
  return load_color(entries_.at(index).path);
}

std::vector<StreamEvent> run_stream(const FrameSource& source, const PipelineConfig& cfg,
                                    const MlpModel& model,
                                    const std::function<void(const StreamEvent&)>& on_event) {
  cfg.validate();
  std::vector<StreamEvent> events;
  const std::size_t n = source.size();
  if (n == 0) return events;
  for (std::size_t i = 1; i < n; ++i) {
    if (source.timestamp(i) < source.timestamp(i - 1)) {
      throw Error(Errc::invalid_argument, "frame timestamps must be nondecreasing");
    }
  }
  const double last = source.timestamp(n - 1);
  std::size_t cursor = 0;  // first frame not yet known to be <= t
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.sampling_period;
    if (t > last) break;
    while (cursor < n && source.timestamp(cursor) <= t) ++cursor;
    if (cursor == 0) continue;  // nothing on air yet

    const auto start = std::chrono::steady_clock::now();
    const ColorImage frame = source.frame(cursor - 1);
    const FrameResult result = process_frame(frame, cfg, model);
    StreamEvent event;
    event.t = t;
    event.detection = result.detection;
    event.processing_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    event.deadline_met = event.processing_seconds < cfg.sampling_period;
    if (result.conflict) {
      std::fprintf(stderr, "t=%.3f: both corners classified as signs, reporting N/C\n", t);
    }
    if (on_event) on_event(event);
    events.push_back(event);
  }
  return events;
}

std::string event_json(const StreamEvent& event) {
  const Detection& d = event.detection;
  const bool sign = d.label != SignClass::none;
  nlohmann::json j;
  j["t"] = event.t;
  j["label"] = to_string(d.label);
  j["a0"] = sign && d.circle ? nlohmann::json(d.circle->a0) : nlohmann::json(nullptr);
  j["b0"] = sign && d.circle ? nlohmann::json(d.circle->b0) : nlohmann::json(nullptr);
  j["r0"] = sign && d.circle ? nlohmann::json(d.circle->r0) : nlohmann::json(nullptr);
  j["corner"] = sign && d.corner ? nlohmann::json(to_string(*d.corner)) : nlohmann::json(nullptr);
  j["ms"] = event.processing_seconds * 1000.0;
  j["deadline_met"] = event.deadline_met;
  return j.dump();
}

namespace {

struct Scene {
  FrameSpec spec;
  int window = -1;  // -1: no sign
};

void check_schedule(const ScheduleParams& p) {
  if (!(p.duration > 0) || !(p.fps > 0)) {
    throw Error(Errc::invalid_argument, "schedule duration and fps must be > 0");
  }
  for (const SignWindow& w : p.windows) {
    if (!(w.duration > 0) || w.start < 0) throw Error(Errc::invalid_argument, "bad sign window");
    if (w.label == SignClass::none) {
      throw Error(Errc::invalid_argument, "sign windows need a sign class");
    }
  }
}

// Scene for window w (or the sign-free scene when w < 0). Badge geometry,
// corner and background are fixed per window.
Scene make_scene(const ScheduleParams& p, int w) {
  Rng rng = Rng::derive(p.seed, static_cast<std::uint64_t>(w + 1));
  Scene scene;
  scene.window = w;
  scene.spec.background = static_cast<Background>(rng.uniform_int(0, 3));
  scene.spec.noise_sigma = p.noise_sigma;
  scene.spec.corner = static_cast<Corner>(rng.uniform_int(0, 1));
  if (w >= 0) {
    const auto polarity = static_cast<Polarity>(rng.uniform_int(0, 1));
    scene.spec.badge = random_badge(p.windows[static_cast<std::size_t>(w)].label,
                                    scene.spec.corner, p.radius, polarity, rng.next_u64());
  }
  scene.spec.seed = rng.next_u64();
  return scene;
}

int window_at(const ScheduleParams& p, double t) {
  for (std::size_t i = 0; i < p.windows.size(); ++i) {
    const SignWindow& w = p.windows[i];
    if (t >= w.start && t < w.start + w.duration) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

std::vector<TimedFrameSpec> plan_schedule(const ScheduleParams& params) {
  check_schedule(params);
  std::vector<Scene> scenes;
  for (int w = -1; w < static_cast<int>(params.windows.size()); ++w) {
    scenes.push_back(make_scene(params, w));
  }
  const auto frames = static_cast<std::size_t>(std::floor(params.duration * params.fps));
  std::vector<TimedFrameSpec> out;
  out.reserve(frames + 1);
  for (std::size_t i = 0; i <= frames; ++i) {
    const double t = static_cast<double>(i) / params.fps;
    if (t > params.duration) break;
    TimedFrameSpec f;
    f.t = t;
    f.spec = scenes[static_cast<std::size_t>(window_at(params, t) + 1)].spec;
    f.spec.seed = Rng::derive(f.spec.seed, i).next_u64();
    out.push_back(std::move(f));
  }
  return out;
}

std::filesystem::path write_schedule(const ScheduleParams& params,
                                     const std::filesystem::path& out_dir) {
  check_schedule(params);
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> names;
  for (int w = -1; w < static_cast<int>(params.windows.size()); ++w) {
    const Scene scene = make_scene(params, w);
    char name[32];
    std::snprintf(name, sizeof name, "scene_%03d.ppm", w + 1);
    save_pnm(out_dir / name, render_frame(scene.spec).image);
    names.emplace_back(name);
  }
  const auto path = out_dir / "schedule.jsonl";
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  const auto frames = static_cast<std::size_t>(std::floor(params.duration * params.fps));
  for (std::size_t i = 0; i <= frames; ++i) {
    const double t = static_cast<double>(i) / params.fps;
    if (t > params.duration) break;
    nlohmann::json j;
    j["t"] = t;
    j["path"] = names[static_cast<std::size_t>(window_at(params, t) + 1)];
    out << j.dump() << '\n';
  }
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  return path;
}

}  // namespace agesign
