#include "doctest.h"

#include <cmath>

#include "agesign/features.hpp"
#include "agesign/mlp.hpp"
#include "agesign/synth.hpp"
#include "support.hpp"

using namespace agesign;
using namespace agesign::test;

namespace {

GlyphCrop badge_glyph(const BadgeSpec& spec) {
  const BadgeRender render = render_badge(spec);
  return glyph_crop(isolate_glyph(render.mask, render.circle), render.circle);
}

int naive_count(const BinaryImage& crop, int row) {
  for (int x = 0; x < crop.width(); ++x)
    if (crop(x, row)) return x;
  return crop.width();
}

BinaryImage upscale2(const BinaryImage& m) {
  BinaryImage out(2 * m.width(), 2 * m.height(), 0);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) out(x, y) = m(x / 2, y / 2);
  return out;
}

std::vector<Sample> random_dataset(Rng& rng, int n, int inputs, int outputs) {
  std::vector<Sample> data;
  for (int i = 0; i < n; ++i) {
    Sample s;
    for (int k = 0; k < inputs; ++k) s.input.push_back(rng.uniform());
    s.target.assign(static_cast<std::size_t>(outputs), 0.0);
    s.target[static_cast<std::size_t>(rng.uniform_int(0, outputs - 1))] = 1.0;
    data.push_back(s);
  }
  return data;
}

double max_gradient_error(const MlpModel& model, std::span<const Sample> data) {
  const MlpModel grad = mlp_gradient(model, data);
  const double h = 1e-4;
  double worst = 0.0;
  for (std::size_t i = 0; i < model.parameter_count(); ++i) {
    MlpModel plus = model, minus = model;
    plus.parameter(i) += h;
    minus.parameter(i) -= h;
    const double fd = (mlp_mse(plus, data) - mlp_mse(minus, data)) / (2 * h);
    const double bp = grad.parameter(i);
    const double denom = std::max({std::abs(fd), std::abs(bp), 1e-8});
    worst = std::max(worst, std::abs(fd - bp) / denom);
  }
  return worst;
}

}  // namespace

TEST_CASE("glyph crop") {
  SUBCASE("plain disc thins to almost nothing") {
    const BinaryImage disc = disc_mask(100, 100, 50, 50, 40);
    const Circle c{50, 50, 40};
    const GlyphCrop crop = glyph_crop(disc, c);
    CHECK(crop.mask.width() == kGlyphCols);
    CHECK(crop.mask.height() == kGlyphRows);
    // only the four box corners outside the disc leave skeleton traces
    CHECK(count_set(crop.mask) <= 0.03 * crop.mask.size());
    for (int y = 20; y < 60; ++y)
      for (int x = 0; x < kGlyphCols; ++x) CHECK(crop.mask(x, y) == 0);
    CHECK(count_set(glyph_crop(isolate_glyph(disc, c), c).mask) == 0);
  }

  SUBCASE("7 badge matches the reference rendering") {
    for (Polarity pol : {Polarity::positive, Polarity::negative}) {
      const BadgeSpec spec = make_badge(SignClass::age7, 40, Vec2{100, 80}, pol);
      CHECK(hausdorff(badge_glyph(spec).mask, reference_glyph(spec)) <= 2.0);
    }
  }

  SUBCASE("negative 13 badge normalizes to the positive one") {
    const GlyphCrop pos = badge_glyph(make_badge(SignClass::age13, 36, Vec2{90, 70}, Polarity::positive));
    const GlyphCrop neg = badge_glyph(make_badge(SignClass::age13, 36, Vec2{90, 70}, Polarity::negative));
    CHECK(pos.polarity_inverted != neg.polarity_inverted);
    CHECK(hausdorff(pos.mask, neg.mask) <= 2.0);
  }

  const BinaryImage disc = disc_mask(40, 40, 20, 20, 10);
  try {
    glyph_crop(disc, Circle{20, 20, 2});
    FAIL("expected degenerate_circle");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_circle);
  }
  CHECK_THROWS_AS(glyph_crop(disc, Circle{60, 20, 10}), Error);
}

TEST_CASE("polarity normalization") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const BinaryImage crop = random_binary(kGlyphCols, kGlyphRows, rng, rng.uniform(0.1, 0.9));
    const PolarityResult a = normalize_polarity(crop);
    const PolarityResult b = normalize_polarity(complement(crop));
    CHECK(a.crop == b.crop);
    CHECK(a.inverted != b.inverted);
    CHECK(normalize_polarity(a.crop).inverted == false);
  }
  const PolarityResult black = normalize_polarity(BinaryImage(kGlyphCols, kGlyphRows, 0));
  CHECK_FALSE(black.inverted);
  CHECK(black.crop == BinaryImage(kGlyphCols, kGlyphRows, 0));
}

TEST_CASE("thinning") {
  BinaryImage bar(20, 20, 0);
  for (int y = 3; y < 17; ++y)
    for (int x = 8; x < 13; ++x) bar(x, y) = 1;
  const BinaryImage thin = zhang_suen_thin(bar);
  CHECK(count_set(thin) > 0);
  for (int y = 0; y < 20; ++y) {
    int row = 0;
    for (int x = 0; x < 20; ++x) row += thin(x, y);
    CHECK(row <= 1);
  }
  CHECK(zhang_suen_thin(thin) == thin);
  CHECK(zhang_suen_thin(BinaryImage(5, 5, 0)) == BinaryImage(5, 5, 0));
}

TEST_CASE("row-scan features") {
  CHECK(extract_features(BinaryImage(kGlyphCols, kGlyphRows, 1)) == FeatureVector{});
  const FeatureVector black = extract_features(BinaryImage(kGlyphCols, kGlyphRows, 0));
  for (auto c : black.counts) CHECK(c == 40);

  BinaryImage pattern(kGlyphCols, kGlyphRows, 0);
  pattern(3, 5) = 1;
  pattern(7, 5) = 1;
  CHECK(extract_features(pattern).counts[5] == 3);

  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const BinaryImage crop = random_binary(kGlyphCols, kGlyphRows, rng, rng.uniform(0.0, 0.2));
    const FeatureVector f = extract_features(crop);
    for (int row = 0; row < kGlyphRows; ++row) {
      CHECK(f.counts[static_cast<std::size_t>(row)] == naive_count(crop, row));
      CHECK(f.counts[static_cast<std::size_t>(row)] <= 40);
    }
  }
  CHECK_THROWS_AS(extract_features(BinaryImage(10, 10, 0)), Error);
}

TEST_CASE("features are scale invariant under 2x upscaling") {
  for (SignClass label : {SignClass::age7, SignClass::age13, SignClass::age18}) {
    for (Polarity pol : {Polarity::positive, Polarity::negative}) {
      for (double r : {20.0, 28.0, 36.0}) {
        const BadgeRender render = render_badge(make_badge(label, r, Vec2{100, 80}, pol));
        const Circle c = render.circle;
        const BinaryImage mask = isolate_glyph(render.mask, c);
        const Circle c2{2 * c.a0 + 0.5, 2 * c.b0 + 0.5, 2 * c.r0};
        const FeatureVector f1 = extract_features(glyph_crop(mask, c));
        const FeatureVector f2 = extract_features(glyph_crop(upscale2(mask), c2));
        int worst = 0;
        for (std::size_t i = 0; i < f1.counts.size(); ++i) {
          worst = std::max(worst, std::abs(int(f1.counts[i]) - int(f2.counts[i])));
        }
        INFO(to_string(label) << " r=" << r << " " << to_string(pol));
        CHECK(worst <= 1);
      }
    }
  }
}

TEST_CASE("classes are separable at identical geometry") {
  for (double r : {20.0, 30.0, 40.0}) {
    std::vector<FeatureVector> fs;
    for (SignClass label : {SignClass::age7, SignClass::age13, SignClass::age18}) {
      fs.push_back(extract_features(badge_glyph(make_badge(label, r, Vec2{100, 80}))));
    }
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (std::size_t j = i + 1; j < fs.size(); ++j) {
        int differ = 0;
        for (int k = 0; k < kFeatureCount; ++k) differ += fs[i].counts[k] != fs[j].counts[k];
        CHECK(differ >= 10);
      }
  }
}

TEST_CASE("mlp forward") {
  MlpModel zero(kFeatureCount, 15, kClassCount);
  const ForwardPass pass = mlp_forward(zero, std::vector<double>(kFeatureCount, 0.7));
  for (double h : pass.hidden) CHECK(h == 0.5);
  for (double o : pass.output) CHECK(o == 0.5);

  MlpModel cell(1, 1, 1);
  cell.w1 = {2.0};
  cell.b1 = {-1.0};
  const ForwardPass one = mlp_forward(cell, std::vector<double>{1.0});
  CHECK(one.hidden[0] == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(logistic(1.0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));

  const MlpModel m = mlp_init(kFeatureCount, 15, kClassCount, 3, 4.0);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureVector x;
    for (auto& c : x.counts) c = static_cast<std::uint8_t>(rng.uniform_int(0, 40));
    for (double o : mlp_forward(m, x)) {
      CHECK(o > 0.0);
      CHECK(o < 1.0);
    }
  }
  CHECK_THROWS_AS(mlp_forward(m, std::vector<double>(3, 0.0)), Error);
}

TEST_CASE("backprop matches finite differences") {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const int inputs = rng.uniform_int(2, 8), hidden = rng.uniform_int(2, 6), outputs = rng.uniform_int(2, 4);
    const MlpModel m = mlp_init(inputs, hidden, outputs, rng.next_u64(), 1.0);
    const auto data = random_dataset(rng, 3, inputs, outputs);
    CHECK(max_gradient_error(m, data) < 1e-5);
  }
}

TEST_CASE("training") {
  Rng rng(5);
  const auto one = random_dataset(rng, 1, kFeatureCount, kClassCount);
  TrainConfig cfg;
  cfg.target_mse = 1e-4;
  cfg.max_epochs = 20000;
  const TrainResult fit = mlp_train(one, cfg);
  CHECK(fit.converged);
  CHECK(fit.error_curve.back() < 1e-3);
  CHECK(mlp_train(one, cfg).model == fit.model);

  cfg.rng_seed = 2;
  CHECK_FALSE(mlp_train(one, cfg).model == fit.model);

  try {
    mlp_train({}, cfg);
    FAIL("expected empty_dataset");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_dataset);
  }
  TrainConfig bad;
  bad.learning_rate = 0;
  CHECK_THROWS_AS(mlp_train(one, bad), Error);

  auto poisoned = random_dataset(rng, 4, kFeatureCount, kClassCount);
  poisoned[2].input[7] = std::nan("");
  try {
    mlp_train(poisoned, cfg);
    FAIL("expected non_finite_loss");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::non_finite_loss);
  }
}

TEST_CASE("classification rule") {
  CHECK(classify({0.9, 0.1, 0.1, 0.1}).label == SignClass::age7);
  CHECK(classify({0.3, 0.3, 0.3, 0.3}, 0.5).label == SignClass::none);
  CHECK(classify({0.1, 0.2, 0.6, 0.1}).label == SignClass::age18);
  CHECK(classify({0.1, 0.2, 0.45, 0.1}, 0.0).label == SignClass::age18);
  CHECK(classify({0.1, 0.2, 0.1, 0.9}).label == SignClass::none);

  CHECK(make_sample(FeatureVector{}, SignClass::age13).target == std::vector<double>{0, 1, 0, 0});
  FeatureVector x;
  x.counts[0] = 40;
  x.counts[1] = 10;
  const auto scaled = scale_features(x);
  CHECK(scaled[0] == 1.0);
  CHECK(scaled[1] == 0.25);
  for (SignClass c : {SignClass::age7, SignClass::age13, SignClass::age18, SignClass::none})
    CHECK(sign_class_from_string(to_string(c)) == c);
}

TEST_CASE("model files") {
  const MlpModel m = mlp_init(kFeatureCount, 15, kClassCount, 77, 0.5);
  const auto bytes = save_model(m);
  CHECK(load_model(bytes) == m);
  CHECK(load_model(bytes, kFeatureCount, 15, kClassCount) == m);

  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::invalid_argument;
  };
  auto corrupt = bytes;
  corrupt[0] ^= 0xff;
  CHECK(code_of([&] { load_model(corrupt); }) == Errc::bad_magic);

  const auto sixteen = save_model(mlp_init(kFeatureCount, 16, kClassCount, 1, 0.5));
  CHECK(code_of([&] { load_model(sixteen, kFeatureCount, 15, kClassCount); }) == Errc::shape_mismatch);

  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 8);
  CHECK(code_of([&] { load_model(cut); }) == Errc::truncated);
  const std::vector<std::uint8_t> tiny(bytes.begin(), bytes.begin() + 10);
  CHECK(code_of([&] { load_model(tiny); }) == Errc::truncated);
}
