#pragma once

#include <string>
#include <vector>

#include "agesign/pipeline.hpp"

namespace agesign {

struct BenchmarkRow {
  Detector detector = Detector::ce;
  SignClass label = SignClass::age7;
  std::size_t count = 0;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;  // sample std-dev (n - 1), 0 for a single frame
  double accuracy_pct = 0.0;
};

struct BenchmarkFrame {
  std::string path;
  Detector detector = Detector::ce;
  SignClass truth = SignClass::none;
  SignClass predicted = SignClass::none;
  double detect_seconds = 0.0;  // preprocessing + detector, both corners
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  std::vector<BenchmarkFrame> frames;
};

/// Runs every eval-split frame through each detector. Rows are grouped by
/// detector then class (7+, 13+, 18+, N/C), skipping classes absent from the
/// split. Throws empty_split when the split has no frames.
BenchmarkReport run_benchmark(const CorpusManifest& manifest, const FrameLoader& loader,
                              const PipelineConfig& base, const MlpModel& model,
                              const std::vector<Detector>& detectors = {Detector::cht,
                                                                        Detector::ce},
                              const std::string& split = "eval");

/// detector,class,n,mean_s,std_s,accuracy_pct
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

double median(std::vector<double> values);

}  // namespace agesign
