#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dsm/autoenc.hpp"
#include "dsm/numkernel.hpp"
#include "dsm/random.hpp"
#include "test_util.hpp"

namespace ae = dsm::autoenc;
using dsm::ErrorCode;
using testutil::code_of;

namespace {

std::vector<double> sine(std::size_t n, double period) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = std::sin(2 * std::numbers::pi * static_cast<double>(t) / period);
  return x;
}

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  dsm::Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

ae::SpectralWindowSet prepared(const std::vector<double>& x) {
  return ae::standardize_features(ae::make_spectral_windows(x, ae::WindowingConfig{}));
}

ae::DissimilarityCurve curve_for(const std::vector<double>& x, std::uint64_t seed) {
  ae::AeConfig cfg;
  cfg.seed = seed;
  const auto w = prepared(x);
  auto trained = ae::train(ae::init_model(w.dim(), cfg), w, cfg);
  return ae::dissimilarity_curve(ae::encode(trained.model, w));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST(SpectralWindows, ConstantSeriesGivesIdenticalWindows) {
  const std::vector<double> x(40, 3.0);
  const auto w = ae::make_spectral_windows(x, {20, 1, 0});
  ASSERT_EQ(w.size(), 21u);
  EXPECT_EQ(w.dim(), 11u);
  for (const auto& f : w.features) EXPECT_EQ(f, w.features.front());
}

TEST(SpectralWindows, OffsetsFollowStride) {
  const auto w = ae::make_spectral_windows(noise(25, 1), {20, 5, 0});
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w.source_offsets, (std::vector<std::size_t>{0, 5}));
}

TEST(SpectralWindows, SinePeriodTenPeaksAtBinTwo) {
  const auto w = ae::make_spectral_windows(sine(100, 10), {20, 1, 0});
  for (const auto& f : w.features) {
    EXPECT_EQ(std::max_element(f.begin(), f.end()) - f.begin(), 2);
  }
}

TEST(SpectralWindows, Errors) {
  EXPECT_EQ(code_of([] { ae::make_spectral_windows(noise(10, 1), {20, 1, 0}); }), ErrorCode::SeriesTooShort);
  EXPECT_THROW(ae::make_spectral_windows(noise(40, 1), {20, 1, 21}), dsm::Error);
  EXPECT_THROW(ae::make_spectral_windows(noise(40, 1), {20, 21, 0}), dsm::Error);
}

TEST(SpectralWindows, StandardizedFeaturesHaveZeroMean) {
  const auto w = prepared(noise(120, 4));
  for (std::size_t j = 0; j < w.dim(); ++j) {
    double s = 0.0;
    for (const auto& f : w.features) s += f[j];
    EXPECT_NEAR(s / static_cast<double>(w.size()), 0.0, 1e-12);
  }
}

TEST(InitModel, DeterministicAndSeedSensitive) {
  ae::AeConfig cfg;
  cfg.seed = 9;
  EXPECT_EQ(ae::init_model(11, cfg), ae::init_model(11, cfg));
  ae::AeConfig other = cfg;
  other.seed = 10;
  EXPECT_NE(ae::init_model(11, cfg), ae::init_model(11, other));
}

TEST(InitModel, WeightsWithinFanInBound) {
  ae::AeConfig cfg;
  cfg.seed = 3;
  const auto m = ae::init_model(16, cfg);
  ASSERT_EQ(m.encoder_hidden.in, 16u);
  for (double w : m.encoder_hidden.weights) {
    EXPECT_GE(w, -0.25);
    EXPECT_LE(w, 0.25);
  }
  m.for_each_layer([](const ae::DenseLayer& l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
    for (double w : l.weights) EXPECT_LE(std::abs(w), bound);
  });
}

TEST(InitModel, LatentMustCompress) {
  ae::AeConfig cfg;
  cfg.latent_dim = 11;
  EXPECT_THROW(ae::init_model(11, cfg), dsm::Error);
}

TEST(Train, ZeroLearningRateLeavesModelUnchanged) {
  const auto w = prepared(sine(60, 10));
  ae::AeConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 1;
  cfg.invariance_weight = 0.0;
  cfg.seed = 5;
  const auto m0 = ae::init_model(w.dim(), cfg);
  const auto r = ae::train(m0, w, cfg);
  EXPECT_EQ(r.model, m0);
  ASSERT_EQ(r.log.total.size(), 1u);
  EXPECT_EQ(r.log.total[0], ae::loss(m0, w, 0.0).reconstruction);
}

TEST(Train, SineLossDropsByHalf) {
  // Raw spectra: a period that divides the window gives identical moduli in
  // every window, which standardization would flatten to all zeros.
  const auto w = ae::make_spectral_windows(sine(200, 10), ae::WindowingConfig{});
  ae::AeConfig cfg;
  cfg.seed = 1;
  const auto r = ae::train(ae::init_model(w.dim(), cfg), w, cfg);
  ASSERT_EQ(r.log.total.size(), cfg.epochs);
  EXPECT_LT(r.log.total.back(), 0.5 * r.log.total.front());
  for (double v : r.log.total) EXPECT_TRUE(std::isfinite(v));
}

TEST(Train, ConstantWindowsHaveNoInvariancePenalty) {
  const auto w = ae::make_spectral_windows(std::vector<double>(50, 1.0), {20, 1, 0});
  ae::AeConfig cfg;
  cfg.invariance_weight = 100.0;
  cfg.epochs = 20;
  const auto r = ae::train(ae::init_model(w.dim(), cfg), w, cfg);
  for (double v : r.log.invariance) EXPECT_NEAR(v, 0.0, 1e-6);
}

TEST(Train, Deterministic) {
  const auto x = noise(150, 77);
  const auto w = prepared(x);
  ae::AeConfig cfg;
  cfg.seed = 4;
  cfg.epochs = 50;
  const auto a = ae::train(ae::init_model(w.dim(), cfg), w, cfg);
  const auto b = ae::train(ae::init_model(w.dim(), cfg), w, cfg);
  EXPECT_EQ(a.log.total, b.log.total);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(ae::dissimilarity_curve(ae::encode(a.model, w)).values,
            ae::dissimilarity_curve(ae::encode(b.model, w)).values);
}

TEST(Train, ReconstructionImproves) {
  const auto w = ae::make_spectral_windows(sine(200, 10), ae::WindowingConfig{});
  ae::AeConfig cfg;
  cfg.seed = 2;
  const auto m0 = ae::init_model(w.dim(), cfg);
  const auto trained = ae::train(m0, w, cfg).model;
  auto mean_err = [&](const ae::AeModel& m) {
    const auto r = ae::reconstruct(m, w);
    double s = 0.0;
    for (double e : r.squared_errors) s += e;
    return s / static_cast<double>(r.squared_errors.size());
  };
  EXPECT_LT(mean_err(trained), mean_err(m0));
}

TEST(Gradient, MatchesCentralDifferences) {
  // three windows of length 8 from a short random series
  const auto w = ae::standardize_features(ae::make_spectral_windows(noise(10, 31), {8, 1, 0}));
  ASSERT_EQ(w.size(), 3u);
  ae::AeConfig cfg;
  cfg.hidden_dim = 6;
  cfg.latent_dim = 2;
  cfg.seed = 8;
  auto model = ae::init_model(w.dim(), cfg);
  // nonzero biases so their gradients are exercised away from the origin
  dsm::Rng rng(99);
  model.for_each_layer([&](ae::DenseLayer& l) {
    for (double& b : l.biases) b = rng.uniform(-0.3, 0.3);
  });
  const double lambda = 0.7;
  const auto grad = ae::gradient(model, w, lambda);

  std::vector<double*> params;
  std::vector<double> analytic;
  model.for_each_layer([&](ae::DenseLayer& l) {
    for (double& v : l.weights) params.push_back(&v);
    for (double& v : l.biases) params.push_back(&v);
  });
  grad.for_each_layer([&](const ae::DenseLayer& l) {
    analytic.insert(analytic.end(), l.weights.begin(), l.weights.end());
    analytic.insert(analytic.end(), l.biases.begin(), l.biases.end());
  });
  ASSERT_EQ(params.size(), analytic.size());

  const double h = 1e-5;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = *params[i];
    *params[i] = saved + h;
    const double up = ae::loss(model, w, lambda).total;
    *params[i] = saved - h;
    const double down = ae::loss(model, w, lambda).total;
    *params[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
    EXPECT_LE(std::abs(numeric - analytic[i]) / scale, 1e-4) << "parameter " << i;
  }
}

TEST(Encode, ShapeAndIdenticalInputs) {
  const auto w = ae::make_spectral_windows(std::vector<double>(45, 2.0), {20, 1, 0});
  ae::AeConfig cfg;
  const auto lat = ae::encode(ae::init_model(w.dim(), cfg), w);
  ASSERT_EQ(lat.size(), w.size());
  for (const auto& l : lat.latents) EXPECT_EQ(l, lat.latents.front());
  for (double d : ae::dissimilarity_curve(lat).values) EXPECT_EQ(d, 0.0);
}

TEST(DissimilarityCurve, ThreeFourFive) {
  ae::LatentTrace t{{{0.0, 0.0}, {3.0, 4.0}}};
  EXPECT_EQ(ae::dissimilarity_curve(t).values, std::vector<double>{5.0});
}

TEST(DissimilarityCurve, LengthIsWindowsMinusOne) {
  for (std::size_t n : {21u, 40u, 97u}) {
    const auto x = noise(n, n);
    const auto w = prepared(x);
    ae::AeConfig cfg;
    cfg.epochs = 5;
    const auto m = ae::train(ae::init_model(w.dim(), cfg), w, cfg).model;
    EXPECT_EQ(ae::dissimilarity_curve(ae::encode(m, w)).size(), w.size() - 1);
  }
}

TEST(DissimilarityCurve, MeanShiftStandsOut) {
  const auto stationary = noise(200, 500);
  auto shifted = noise(200, 501);
  for (std::size_t t = 100; t < 200; ++t) shifted[t] += 5.0;

  const auto d_stat = curve_for(stationary, 1).values;
  const auto d_shift = curve_for(shifted, 1).values;
  const double peak_stat = *std::max_element(d_stat.begin(), d_stat.end()) / median(d_stat);
  const double peak_shift = *std::max_element(d_shift.begin(), d_shift.end()) / median(d_shift);
  EXPECT_GT(peak_shift, peak_stat);
  EXPECT_LT(dsm::numkernel::coefficient_of_variation(d_stat), dsm::numkernel::coefficient_of_variation(d_shift));
}
