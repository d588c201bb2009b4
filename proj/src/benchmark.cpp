#include "agesign/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace agesign {

BenchmarkReport run_benchmark(const CorpusManifest& manifest, const FrameLoader& loader,
                              const PipelineConfig& base, const MlpModel& model,
                              const std::vector<Detector>& detectors, const std::string& split) {
  base.validate();
  if (detectors.empty()) throw Error(Errc::invalid_argument, "no detectors to benchmark");
  BenchmarkReport report;
  for (const ManifestEntry& entry : manifest) {
    if (entry.split != split) continue;
    const ColorImage frame = loader(entry);
    for (Detector detector : detectors) {
      PipelineConfig cfg = base;
      cfg.detector = detector;
      const FrameResult result = process_frame(frame, cfg, model);
      if (result.conflict) {
        std::fprintf(stderr, "%s (%s): both corners classified as signs, reporting N/C\n",
                     entry.path.c_str(), to_string(detector));
      }
      report.frames.push_back(
          {entry.path, detector, entry.label, result.detection.label, result.detect_seconds});
    }
  }
  if (report.frames.empty()) throw Error(Errc::empty_split, "split '" + split + "' is empty");

  for (Detector detector : detectors) {
    for (std::size_t c = 0; c < kClassCount; ++c) {
      const auto label = static_cast<SignClass>(c);
      std::vector<double> times;
      std::size_t correct = 0;
      for (const BenchmarkFrame& f : report.frames) {
        if (f.detector != detector || f.truth != label) continue;
        times.push_back(f.detect_seconds);
        if (f.predicted == f.truth) ++correct;
      }
      if (times.empty()) continue;
      BenchmarkRow row;
      row.detector = detector;
      row.label = label;
      row.count = times.size();
      const double n = static_cast<double>(times.size());
      row.mean_seconds = std::accumulate(times.begin(), times.end(), 0.0) / n;
      if (times.size() > 1) {
        double ss = 0.0;
        for (double t : times) ss += (t - row.mean_seconds) * (t - row.mean_seconds);
        row.std_seconds = std::sqrt(ss / (n - 1.0));
      }
      row.accuracy_pct = 100.0 * static_cast<double>(correct) / n;
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::string out = "detector,class,n,mean_s,std_s,accuracy_pct\n";
  char buf[160];
  for (const BenchmarkRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.6f,%.6f,%.2f\n", to_string(r.detector),
                  to_string(r.label), r.count, r.mean_seconds, r.std_seconds, r.accuracy_pct);
    out += buf;
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::invalid_argument, "median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = (m + *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid))) / 2;
  }
  return m;
}

}  // namespace agesign
