#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agesign/features.hpp"

namespace agesign {

enum class SignClass { age7 = 0, age13 = 1, age18 = 2, none = 3 };

inline constexpr int kClassCount = 4;

const char* to_string(SignClass label) noexcept;
SignClass sign_class_from_string(const std::string& text);

/// Two fully connected logistic layers: inputs -> hidden -> outputs.
/// Weight matrices are row-major with one row per receiving cell.
struct MlpModel {
  int inputs = 0;
  int hidden = 0;
  int outputs = 0;
  std::vector<double> w1;  // hidden x inputs
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // outputs x hidden
  std::vector<double> b2;  // outputs

  MlpModel() = default;
  MlpModel(int inputs, int hidden, int outputs);

  std::size_t parameter_count() const noexcept {
    return w1.size() + b1.size() + w2.size() + b2.size();
  }
  /// Flat view order: w1, b1, w2, b2.
  double& parameter(std::size_t index);
  double parameter(std::size_t index) const;

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

struct Sample {
  std::vector<double> input;
  std::vector<double> target;
};

struct TrainConfig {
  double learning_rate = 0.5;
  int max_epochs = 5000;
  double target_mse = 0.01;
  std::uint64_t rng_seed = 1;
  double init_range = 0.5;
  int hidden = 15;
};

struct TrainResult {
  MlpModel model;
  std::vector<double> error_curve;  // MSE at the start of each epoch, then the final MSE
  bool converged = false;
};

double logistic(double v) noexcept;

struct ForwardPass {
  std::vector<double> hidden;
  std::vector<double> output;
};

ForwardPass mlp_forward(const MlpModel& model, std::span<const double> input);
std::array<double, kClassCount> mlp_forward(const MlpModel& model, const FeatureVector& x);

/// Counts scaled into [0, 1] by dividing by the crop width.
std::vector<double> scale_features(const FeatureVector& x);
std::vector<double> one_hot(SignClass label);
Sample make_sample(const FeatureVector& x, SignClass label);

/// Mean over samples and output cells of the squared error.
double mlp_mse(const MlpModel& model, std::span<const Sample> dataset);

/// Backpropagated gradient of mlp_mse, laid out like the model.
MlpModel mlp_gradient(const MlpModel& model, std::span<const Sample> dataset);

/// Uniform [-range, range] weights drawn from the seeded generator.
MlpModel mlp_init(int inputs, int hidden, int outputs, std::uint64_t seed, double range);

/// Full-batch gradient descent until target_mse or max_epochs.
TrainResult mlp_train(std::span<const Sample> dataset, const TrainConfig& cfg);

struct Classification {
  SignClass label = SignClass::none;
  std::array<double, kClassCount> activations{};
};

/// Argmax, replaced by N/C when the winning activation is below the threshold.
Classification classify(const std::array<double, kClassCount>& activations,
                        double reject_threshold = 0.5);
Classification classify(const MlpModel& model, const FeatureVector& x,
                        double reject_threshold = 0.5);

/// "AGSNMLP\0", u32 version, u32 inputs/hidden/outputs, then w1 b1 w2 b2 as
/// little-endian IEEE doubles.
std::vector<std::uint8_t> save_model(const MlpModel& model);
MlpModel load_model(std::span<const std::uint8_t> bytes);
/// Also rejects shapes other than the expected one.
MlpModel load_model(std::span<const std::uint8_t> bytes, int inputs, int hidden, int outputs);

}  // namespace agesign
