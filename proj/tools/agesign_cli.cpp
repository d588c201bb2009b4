#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "agesign/annotate.hpp"
#include "agesign/benchmark.hpp"
#include "agesign/pipeline.hpp"
#include "agesign/pnm.hpp"
#include "agesign/stream.hpp"

namespace fs = std::filesystem;
using namespace agesign;

namespace {

MlpModel read_model(const std::string& path) {
  return load_model(read_file(path), kFeatureCount, 15, kClassCount);
}

std::array<int, 3> parse_counts(const std::string& text) {
  std::array<int, 3> out{};
  std::stringstream ss(text);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i == 3) throw Error(Errc::invalid_argument, "expected three counts, e.g. 43,27,41");
    out[static_cast<std::size_t>(i++)] = std::stoi(item);
  }
  if (i != 3) throw Error(Errc::invalid_argument, "expected three counts, e.g. 43,27,41");
  return out;
}

struct CommonOpts {
  std::string detector = "ce";
  double edge_fraction = 0.2;
  double reject = 0.5;
  double inset = 0.0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--detector", o.detector, "cht or ce")->check(CLI::IsMember({"cht", "ce"}));
  cmd->add_option("--edge-fraction", o.edge_fraction, "edge threshold as a fraction of max |G|");
  cmd->add_option("--reject", o.reject, "minimum winning activation");
  cmd->add_option("--glyph-inset", o.inset, "pixels taken off r0 before the glyph crop");
}

PipelineConfig make_config(const CommonOpts& o) {
  PipelineConfig cfg;
  cfg.detector = detector_from_string(o.detector);
  cfg.edge.threshold_fraction = o.edge_fraction;
  cfg.reject_threshold = o.reject;
  cfg.glyph_radius_inset = o.inset;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-range sign detection and classification"};
  app.require_subcommand(1);

  // synth
  CorpusParams corpus;
  std::string counts_text = "43,27,41";
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic corpus");
  synth->add_option("--train-per-class", corpus.train_per_class);
  synth->add_option("--eval-counts", counts_text, "eval frames for 7+,13+,18+");
  synth->add_option("--train-nc", corpus.train_nc, "N/C training frames");
  synth->add_option("--eval-nc", corpus.eval_nc, "N/C eval frames");
  synth->add_option("--r-min", corpus.r_min);
  synth->add_option("--r-max", corpus.r_max);
  synth->add_option("--max-sigma", corpus.max_sigma, "largest per-channel noise sigma");
  synth->add_option("--seed", corpus.seed);
  synth->add_option("--out", synth_out)->required();

  // train
  std::string train_corpus, train_out;
  TrainConfig tcfg;
  CommonOpts train_opts;
  auto* train = app.add_subcommand("train", "train the classifier on a corpus's train split");
  train->add_option("--corpus", train_corpus)->required();
  train->add_option("--seed", tcfg.rng_seed);
  train->add_option("--out", train_out)->required();
  train->add_option("--lr", tcfg.learning_rate);
  train->add_option("--epochs", tcfg.max_epochs);
  train->add_option("--target-mse", tcfg.target_mse);
  add_common(train, train_opts);

  // detect
  std::string image_path, model_path, annotate_path, dump_dir;
  bool json_out = false;
  CommonOpts detect_opts;
  auto* detect = app.add_subcommand("detect", "detect and classify the sign in one frame");
  detect->add_option("--image", image_path)->required();
  detect->add_option("--model", model_path)->required();
  detect->add_option("--annotate", annotate_path, "write an annotated copy here");
  detect->add_option("--dump-dir", dump_dir, "write intermediate stages here");
  detect->add_flag("--json", json_out);
  add_common(detect, detect_opts);

  // stream
  std::string schedule_path, stream_model;
  double period = 4.0;
  CommonOpts stream_opts;
  auto* stream = app.add_subcommand("stream", "sample a frame schedule every period seconds");
  stream->add_option("--schedule", schedule_path)->required();
  stream->add_option("--model", stream_model)->required();
  stream->add_option("--period", period);
  add_common(stream, stream_opts);

  // bench
  std::string bench_corpus, bench_model, bench_out;
  CommonOpts bench_opts;
  auto* bench = app.add_subcommand("bench", "time and score both detectors on the eval split");
  bench->add_option("--corpus", bench_corpus)->required();
  bench->add_option("--model", bench_model)->required();
  bench->add_option("--out", bench_out)->required();
  add_common(bench, bench_opts);

  // schedule
  ScheduleParams sched;
  std::vector<std::string> windows;
  std::string sched_out;
  auto* schedule = app.add_subcommand("schedule", "write a synthetic frame schedule");
  schedule->add_option("--duration", sched.duration);
  schedule->add_option("--fps", sched.fps);
  schedule->add_option("--window", windows, "START:LABEL, repeatable, e.g. 10:13+");
  double sign_duration = 10.0;
  schedule->add_option("--sign-duration", sign_duration);
  schedule->add_option("--radius", sched.radius);
  schedule->add_option("--sigma", sched.noise_sigma);
  schedule->add_option("--seed", sched.seed);
  schedule->add_option("--out", sched_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      corpus.eval_counts = parse_counts(counts_text);
      const CorpusManifest manifest = generate_corpus(corpus, synth_out);
      std::fprintf(stderr, "wrote %zu frames to %s\n", manifest.size(), synth_out.c_str());
      return 0;
    }

    if (*train) {
      const PipelineConfig cfg = make_config(train_opts);
      const CorpusManifest manifest = read_manifest(fs::path(train_corpus) / "manifest.jsonl");
      const TrainingSet set = collect_training_set(manifest, directory_loader(train_corpus), cfg);
      for (const std::string& p : set.skipped) {
        std::fprintf(stderr, "skipped %s: no features\n", p.c_str());
      }
      const TrainResult result = mlp_train(set.samples, tcfg);
      const auto bytes = save_model(result.model);
      write_file(train_out, bytes);
      std::fprintf(stderr, "%zu samples, %zu epochs, final mse %.6f%s\n", set.samples.size(),
                   result.error_curve.size() - 1, result.error_curve.back(),
                   result.converged ? "" : " (target not reached)");
      return result.converged ? 0 : 2;
    }

    if (*detect) {
      const PipelineConfig cfg = make_config(detect_opts);
      const MlpModel model = read_model(model_path);
      const ColorImage frame = load_color(image_path);
      std::array<CornerDebug, 2> debug;
      const FrameResult result =
          process_frame(frame, cfg, model, dump_dir.empty() ? nullptr : &debug);
      if (result.conflict) std::fprintf(stderr, "both corners classified as signs, reporting N/C\n");
      if (!dump_dir.empty()) {
        fs::create_directories(dump_dir);
        for (std::size_t i = 0; i < 2; ++i) {
          const std::string tag = to_string(result.corners[i].analysis.corner);
          const CornerDebug& d = debug[i];
          auto bin = [](const BinaryImage& b) {
            GrayImage g(b.width(), b.height());
            for (std::size_t k = 0; k < b.size(); ++k) g.pixels()[k] = b.pixels()[k] ? 255 : 0;
            return g;
          };
          save_pnm(fs::path(dump_dir) / (tag + "_gray.pgm"), d.gray);
          if (d.stages.magnitude.size()) {
            save_pnm(fs::path(dump_dir) / (tag + "_sobel.pgm"), d.stages.magnitude);
            save_pnm(fs::path(dump_dir) / (tag + "_edges.pgm"), bin(d.stages.edges));
            save_pnm(fs::path(dump_dir) / (tag + "_filled.pgm"), bin(d.stages.filled));
          }
          if (d.selected) save_pnm(fs::path(dump_dir) / (tag + "_object.pgm"), bin(*d.selected));
          if (d.glyph) save_pnm(fs::path(dump_dir) / (tag + "_glyph.pgm"), bin(*d.glyph));
          if (!result.corners[i].analysis.failure.empty()) {
            std::fprintf(stderr, "%s: %s\n", tag.c_str(),
                         result.corners[i].analysis.failure.c_str());
          }
        }
      }
      if (json_out) {
        std::cout << detection_json(result.detection) << '\n';
      } else {
        const Detection& d = result.detection;
        std::cout << to_string(d.label);
        if (d.label != SignClass::none && d.circle) {
          std::printf(" at (%.2f, %.2f) r=%.2f %s", d.circle->a0, d.circle->b0, d.circle->r0,
                      to_string(*d.corner));
          std::fflush(stdout);
        }
        std::cout << '\n';
      }
      if (!annotate_path.empty()) save_pnm(annotate_path, annotate_output(frame, result.detection));
      return 0;
    }

    if (*stream) {
      PipelineConfig cfg = make_config(stream_opts);
      cfg.sampling_period = period;
      const MlpModel model = read_model(stream_model);
      const ScheduleFileSource source(schedule_path);
      std::size_t misses = 0;
      run_stream(source, cfg, model, [&](const StreamEvent& e) {
        std::cout << event_json(e) << std::endl;
        if (!e.deadline_met) ++misses;
      });
      if (misses) std::fprintf(stderr, "%zu deadline violation(s)\n", misses);
      return misses ? 1 : 0;
    }

    if (*bench) {
      const PipelineConfig cfg = make_config(bench_opts);
      const MlpModel model = read_model(bench_model);
      const CorpusManifest manifest = read_manifest(fs::path(bench_corpus) / "manifest.jsonl");
      const BenchmarkReport report =
          run_benchmark(manifest, directory_loader(bench_corpus), cfg, model);
      const std::string csv = benchmark_csv(report.rows);
      std::ofstream(bench_out) << csv;
      std::cout << csv;
      return 0;
    }

    if (*schedule) {
      for (const std::string& w : windows) {
        const auto colon = w.find(':');
        if (colon == std::string::npos) {
          throw Error(Errc::invalid_argument, "window must look like START:LABEL");
        }
        sched.windows.push_back(
            {std::stod(w.substr(0, colon)), sign_duration, sign_class_from_string(w.substr(colon + 1))});
      }
      const fs::path path = write_schedule(sched, sched_out);
      std::fprintf(stderr, "wrote %s\n", path.c_str());
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", errc_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
