#include "agesign/mlp.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "agesign/rng.hpp"

namespace agesign {
namespace {

constexpr char kMagic[8] = {'A', 'G', 'S', 'N', 'M', 'L', 'P', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(Errc::truncated, "model file ends early");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void check_sample_shapes(const MlpModel& model, std::span<const Sample> dataset) {
  for (const Sample& s : dataset) {
    if (static_cast<int>(s.input.size()) != model.inputs ||
        static_cast<int>(s.target.size()) != model.outputs) {
      throw Error(Errc::shape_mismatch, "sample does not match the model shape");
    }
  }
}

}  // namespace

const char* to_string(SignClass label) noexcept {
  switch (label) {
    case SignClass::age7: return "7+";
    case SignClass::age13: return "13+";
    case SignClass::age18: return "18+";
    case SignClass::none: return "N/C";
  }
  return "N/C";
}

SignClass sign_class_from_string(const std::string& text) {
  if (text == "7+") return SignClass::age7;
  if (text == "13+") return SignClass::age13;
  if (text == "18+") return SignClass::age18;
  if (text == "N/C") return SignClass::none;
  throw Error(Errc::invalid_argument, "unknown class label '" + text + "'");
}

MlpModel::MlpModel(int inputs_, int hidden_, int outputs_)
    : inputs(inputs_), hidden(hidden_), outputs(outputs_) {
  if (inputs < 1 || hidden < 1 || outputs < 1) {
    throw Error(Errc::invalid_argument, "layer sizes must be positive");
  }
  w1.assign(static_cast<std::size_t>(hidden) * inputs, 0.0);
  b1.assign(static_cast<std::size_t>(hidden), 0.0);
  w2.assign(static_cast<std::size_t>(outputs) * hidden, 0.0);
  b2.assign(static_cast<std::size_t>(outputs), 0.0);
}

double& MlpModel::parameter(std::size_t index) {
  if (index < w1.size()) return w1[index];
  index -= w1.size();
  if (index < b1.size()) return b1[index];
  index -= b1.size();
  if (index < w2.size()) return w2[index];
  index -= w2.size();
  if (index < b2.size()) return b2[index];
  throw Error(Errc::invalid_argument, "parameter index out of range");
}

double MlpModel::parameter(std::size_t index) const {
  return const_cast<MlpModel&>(*this).parameter(index);
}

double logistic(double v) noexcept { return 1.0 / (1.0 + std::exp(-v)); }

ForwardPass mlp_forward(const MlpModel& model, std::span<const double> input) {
  if (static_cast<int>(input.size()) != model.inputs) {
    throw Error(Errc::shape_mismatch, "input length does not match the model");
  }
  ForwardPass pass;
  pass.hidden.resize(static_cast<std::size_t>(model.hidden));
  pass.output.resize(static_cast<std::size_t>(model.outputs));
  for (int j = 0; j < model.hidden; ++j) {
    const double* w = &model.w1[static_cast<std::size_t>(j) * model.inputs];
    double sum = model.b1[j];
    for (int i = 0; i < model.inputs; ++i) sum += w[i] * input[i];
    pass.hidden[j] = logistic(sum);
  }
  for (int k = 0; k < model.outputs; ++k) {
    const double* w = &model.w2[static_cast<std::size_t>(k) * model.hidden];
    double sum = model.b2[k];
    for (int j = 0; j < model.hidden; ++j) sum += w[j] * pass.hidden[j];
    pass.output[k] = logistic(sum);
  }
  return pass;
}

std::vector<double> scale_features(const FeatureVector& x) {
  std::vector<double> out(kFeatureCount);
  for (int i = 0; i < kFeatureCount; ++i) out[i] = x.counts[i] / static_cast<double>(kGlyphCols);
  return out;
}

std::array<double, kClassCount> mlp_forward(const MlpModel& model, const FeatureVector& x) {
  if (model.outputs != kClassCount) {
    throw Error(Errc::shape_mismatch, "classifier model needs 4 outputs");
  }
  const auto pass = mlp_forward(model, scale_features(x));
  std::array<double, kClassCount> out{};
  for (int k = 0; k < kClassCount; ++k) out[k] = pass.output[k];
  return out;
}

std::vector<double> one_hot(SignClass label) {
  std::vector<double> t(kClassCount, 0.0);
  t[static_cast<int>(label)] = 1.0;
  return t;
}

Sample make_sample(const FeatureVector& x, SignClass label) {
  return Sample{scale_features(x), one_hot(label)};
}

double mlp_mse(const MlpModel& model, std::span<const Sample> dataset) {
  if (dataset.empty()) throw Error(Errc::empty_dataset, "no samples");
  check_sample_shapes(model, dataset);
  double total = 0.0;
  for (const Sample& s : dataset) {
    const auto pass = mlp_forward(model, s.input);
    for (int k = 0; k < model.outputs; ++k) {
      const double e = pass.output[k] - s.target[k];
      total += e * e;
    }
  }
  return total / (static_cast<double>(dataset.size()) * model.outputs);
}

MlpModel mlp_gradient(const MlpModel& model, std::span<const Sample> dataset) {
  if (dataset.empty()) throw Error(Errc::empty_dataset, "no samples");
  check_sample_shapes(model, dataset);
  MlpModel grad(model.inputs, model.hidden, model.outputs);
  const double scale = 2.0 / (static_cast<double>(dataset.size()) * model.outputs);
  std::vector<double> delta_out(static_cast<std::size_t>(model.outputs));
  std::vector<double> delta_hidden(static_cast<std::size_t>(model.hidden));
  for (const Sample& s : dataset) {
    const auto pass = mlp_forward(model, s.input);
    for (int k = 0; k < model.outputs; ++k) {
      const double y = pass.output[k];
      delta_out[k] = scale * (y - s.target[k]) * y * (1.0 - y);
    }
    for (int j = 0; j < model.hidden; ++j) {
      double back = 0.0;
      for (int k = 0; k < model.outputs; ++k) {
        back += delta_out[k] * model.w2[static_cast<std::size_t>(k) * model.hidden + j];
      }
      const double h = pass.hidden[j];
      delta_hidden[j] = back * h * (1.0 - h);
    }
    for (int k = 0; k < model.outputs; ++k) {
      double* g = &grad.w2[static_cast<std::size_t>(k) * model.hidden];
      for (int j = 0; j < model.hidden; ++j) g[j] += delta_out[k] * pass.hidden[j];
      grad.b2[k] += delta_out[k];
    }
    for (int j = 0; j < model.hidden; ++j) {
      double* g = &grad.w1[static_cast<std::size_t>(j) * model.inputs];
      for (int i = 0; i < model.inputs; ++i) g[i] += delta_hidden[j] * s.input[i];
      grad.b1[j] += delta_hidden[j];
    }
  }
  return grad;
}

MlpModel mlp_init(int inputs, int hidden, int outputs, std::uint64_t seed, double range) {
  MlpModel model(inputs, hidden, outputs);
  Rng rng(seed);
  for (std::size_t i = 0; i < model.parameter_count(); ++i) {
    model.parameter(i) = rng.uniform(-range, range);
  }
  return model;
}

TrainResult mlp_train(std::span<const Sample> dataset, const TrainConfig& cfg) {
  if (dataset.empty()) throw Error(Errc::empty_dataset, "training set is empty");
  if (!(cfg.learning_rate > 0.0) || !(cfg.target_mse > 0.0) || cfg.max_epochs < 0) {
    throw Error(Errc::invalid_argument, "learning rate and target MSE must be positive");
  }
  TrainResult result;
  result.model = mlp_init(static_cast<int>(dataset.front().input.size()), cfg.hidden,
                          static_cast<int>(dataset.front().target.size()), cfg.rng_seed,
                          cfg.init_range);
  MlpModel& model = result.model;
  for (int epoch = 0; epoch <= cfg.max_epochs; ++epoch) {
    const double mse = mlp_mse(model, dataset);
    if (!std::isfinite(mse)) throw Error(Errc::non_finite_loss, "training diverged");
    result.error_curve.push_back(mse);
    if (mse <= cfg.target_mse) {
      result.converged = true;
      break;
    }
    if (epoch == cfg.max_epochs) break;
    const MlpModel grad = mlp_gradient(model, dataset);
    for (std::size_t i = 0; i < model.parameter_count(); ++i) {
      model.parameter(i) -= cfg.learning_rate * grad.parameter(i);
    }
  }
  return result;
}

Classification classify(const std::array<double, kClassCount>& activations,
                        double reject_threshold) {
  Classification c;
  c.activations = activations;
  int best = 0;
  for (int k = 1; k < kClassCount; ++k) {
    if (activations[k] > activations[best]) best = k;
  }
  c.label = activations[best] < reject_threshold ? SignClass::none
                                                 : static_cast<SignClass>(best);
  return c;
}

Classification classify(const MlpModel& model, const FeatureVector& x,
                        double reject_threshold) {
  return classify(mlp_forward(model, x), reject_threshold);
}

std::vector<std::uint8_t> save_model(const MlpModel& model) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(model.inputs));
  put_u32(out, static_cast<std::uint32_t>(model.hidden));
  put_u32(out, static_cast<std::uint32_t>(model.outputs));
  for (std::size_t i = 0; i < model.parameter_count(); ++i) put_f64(out, model.parameter(i));
  return out;
}

MlpModel load_model(std::span<const std::uint8_t> bytes) {
  ByteReader reader(bytes);
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(reader.take(sizeof(kMagic)).data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(Errc::bad_magic, "not a model file");
  }
  const std::uint32_t version = reader.u32();
  if (version != kFormatVersion) {
    throw Error(Errc::bad_magic, "unsupported model version " + std::to_string(version));
  }
  const auto inputs = reader.u32();
  const auto hidden = reader.u32();
  const auto outputs = reader.u32();
  if (inputs == 0 || hidden == 0 || outputs == 0 || inputs > 100000 || hidden > 100000 ||
      outputs > 100000) {
    throw Error(Errc::shape_mismatch, "implausible layer sizes");
  }
  MlpModel model(static_cast<int>(inputs), static_cast<int>(hidden), static_cast<int>(outputs));
  reader.need(model.parameter_count() * 8);
  for (std::size_t i = 0; i < model.parameter_count(); ++i) {
    const double v = reader.f64();
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "non-finite weight");
    model.parameter(i) = v;
  }
  return model;
}

MlpModel load_model(std::span<const std::uint8_t> bytes, int inputs, int hidden, int outputs) {
  MlpModel model = load_model(bytes);
  if (model.inputs != inputs || model.hidden != hidden || model.outputs != outputs) {
    throw Error(Errc::shape_mismatch,
                "model is " + std::to_string(model.inputs) + "-" + std::to_string(model.hidden) +
                    "-" + std::to_string(model.outputs) + ", expected " +
                    std::to_string(inputs) + "-" + std::to_string(hidden) + "-" +
                    std::to_string(outputs));
  }
  return model;
}

}  // namespace agesign
