#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dsm/dsmetric.hpp"
#include "dsm/random.hpp"
#include "dsm/synthsig.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace dm = dsm::dsmetric;
namespace nk = dsm::numkernel;
namespace ss = dsm::synthsig;
using dsm::ErrorCode;
using testutil::code_of;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  dsm::Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

std::vector<double> sine(std::size_t n, double period, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t)
    x[t] = std::sin(2 * std::numbers::pi * static_cast<double>(t) / period + phase);
  return x;
}

double ds_of(const std::vector<double>& x, std::uint64_t seed = 0) {
  dm::DsConfig cfg;
  cfg.ae.seed = seed;
  return dm::compute_ds(nk::RealSeries(x), cfg).ds;
}

}  // namespace

TEST(ScaleGrid, Examples) {
  const auto g = dm::scale_grid(5, 2, 50);
  ASSERT_EQ(g.size(), 23u);
  EXPECT_EQ(g.window_sizes.front(), 5u);
  EXPECT_EQ(g.window_sizes.back(), 49u);
  EXPECT_EQ(g, dm::default_scale_grid());
  EXPECT_EQ(dm::scale_grid(5, 2, 5).window_sizes, std::vector<std::size_t>{5});
  EXPECT_EQ(code_of([] { dm::scale_grid(6, 2, 5); }), ErrorCode::EmptyGrid);
}

TEST(WindowBias, Examples) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_DOUBLE_EQ(dm::window_bias(x, 2, 3), 2.0);
  const std::vector<double> c(30, 4.25);
  for (std::size_t w = 1; w <= 30; ++w) EXPECT_DOUBLE_EQ(dm::window_bias(c, 29, w), 4.25);
  EXPECT_EQ(code_of([&] { dm::window_bias(x, 1, 3); }), ErrorCode::WindowOutOfRange);
}

TEST(WindowBias, MatchesBruteForceMean) {
  const auto x = noise(60, 3);
  for (std::size_t w = 1; w <= 60; ++w) {
    for (std::size_t t = w - 1; t < 60; ++t) {
      double s = 0.0;
      for (std::size_t j = t + 1 - w; j <= t; ++j) s += x[j];
      EXPECT_NEAR(dm::window_bias(x, t, w), s / static_cast<double>(w), 1e-12);
    }
  }
}

TEST(BiasCorrect, Examples) {
  const std::vector<double> d{1, 1, 1, 1}, x{2, 2, 2, 2};
  EXPECT_EQ(dm::bias_correct(d, x, 2).values, (std::vector<double>{3, 3, 3, 3}));

  const std::vector<double> d2{0.5, 1.5, 2.5, 3.5}, zero_mean{-1, 1, 2, -2};
  EXPECT_EQ(dm::bias_correct(d2, zero_mean, 2).values, d2);

  const auto r = dm::bias_correct(noise(13, 1), noise(13, 2), 5);
  EXPECT_EQ(r.values.size(), 10u);
  EXPECT_EQ(r.scale, 5u);
}

TEST(BiasCorrect, MatchesBruteForce) {
  const auto d = noise(57, 10), x = noise(57, 11);
  const std::size_t w = 5;
  const auto r = dm::bias_correct(d, x, w);
  ASSERT_EQ(r.values.size(), 55u);
  for (std::size_t j = 0; j < 55; ++j) {
    const std::size_t k = j / w;
    double b = 0.0;
    for (std::size_t i = k * w; i < (k + 1) * w; ++i) b += x[i];
    EXPECT_NEAR(r.values[j], d[j] + b / w, 1e-12);
  }
}

TEST(KlPerScale, AffineCopyIsZero) {
  const auto x = noise(40, 5);
  dm::BiasCorrectedCurve d{{}, 5};
  for (double v : x) d.values.push_back(3.0 * v + 7.0);
  EXPECT_NEAR(dm::kl_per_scale(x, d), 0.0, 1e-9);
}

TEST(KlPerScale, MatchesComposedOracle) {
  const auto x = noise(35, 6);
  dm::BiasCorrectedCurve d{noise(30, 7), 5};
  const auto p = nk::normalize_to_distribution(std::span<const double>(x).first(30));
  const auto q = nk::normalize_to_distribution(d.values);
  EXPECT_EQ(dm::kl_per_scale(x, d), nk::kl_divergence(p, q));
}

TEST(KlPerScale, ConstantCurve) {
  dm::BiasCorrectedCurve d{std::vector<double>(10, 1.0), 5};
  EXPECT_EQ(code_of([&] { dm::kl_per_scale(noise(10, 1), d); }), ErrorCode::ConstantSeries);
}

TEST(Cv1, Examples) {
  EXPECT_DOUBLE_EQ(dm::cv1({{{5, 2.0}, {7, 2.0}, {9, 2.0}}}), 0.0);
  EXPECT_NEAR(dm::cv1({{{5, 1.0}, {7, 3.0}}}), 50.0, 1e-12);
  EXPECT_EQ(code_of([] { dm::cv1({{{5, 1.0}}}); }), ErrorCode::InsufficientScales);
}

TEST(ProminenceCov, Examples) {
  const std::vector<double> equal(12, 2.5);
  for (double v : dm::prominence_cov(equal, dm::scale_grid(3, 2, 7)).values) EXPECT_EQ(v, 0.0);

  const auto pc = dm::prominence_cov(noise(10, 1), dm::scale_grid(5, 1, 5));
  ASSERT_EQ(pc.ranges.size(), 1u);
  EXPECT_EQ(pc.ranges[0].end - pc.ranges[0].begin, 2u);
  EXPECT_EQ(code_of([] { dm::prominence_cov(std::vector<double>{1, 2}, dm::scale_grid(5, 2, 9)); }),
            ErrorCode::NoUsableScales);
}

TEST(ProminenceCov, MatchesBruteForceDoubleLoop) {
  std::vector<double> prom;
  for (const auto& p : oracle::brute_peaks(noise(300, 12))) prom.push_back(p.prominence);
  const auto grid = dm::default_scale_grid();
  const auto pc = dm::prominence_cov(prom, grid);
  std::vector<double> want;
  for (std::size_t w : grid.window_sizes) {
    if (w > prom.size()) continue;
    for (std::size_t s = 0; s + w <= prom.size(); s += w)
      want.push_back(oracle::cv_percent(std::vector<double>(prom.begin() + s, prom.begin() + s + w)));
  }
  ASSERT_EQ(pc.values.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(pc.values[i], want[i], 1e-9);
}

TEST(Cv2, Examples) {
  dm::ProminenceCov pc;
  pc.values = {4, 4, 4};
  EXPECT_DOUBLE_EQ(dm::cv2(pc), 0.0);
  pc.values = {10, 30};
  EXPECT_NEAR(dm::cv2(pc), 50.0, 1e-12);
  pc.values.clear();
  EXPECT_EQ(code_of([&] { dm::cv2(pc); }), ErrorCode::InsufficientData);
}

TEST(Classify, Threshold) {
  EXPECT_EQ(dm::classify_stochastic(1.49), dm::StochasticityLabel::Stochastic);
  EXPECT_EQ(dm::classify_stochastic(1.51), dm::StochasticityLabel::NonStochastic);
  EXPECT_EQ(dm::classify_stochastic(1.5), dm::StochasticityLabel::NonStochastic);
  EXPECT_EQ(dm::classify_stochastic(2.0, 3.0), dm::StochasticityLabel::Stochastic);
  EXPECT_EQ(dm::label_name(dm::StochasticityLabel::Stochastic), "stochastic");
}

TEST(ComputeDs, NoiseIsStochasticAndSineIsNot) {
  const auto n = dm::compute_ds(nk::RealSeries(noise(200, 42)), {});
  EXPECT_LT(n.ds, 1.5);
  EXPECT_EQ(n.label, dm::StochasticityLabel::Stochastic);
  const auto s = dm::compute_ds(nk::RealSeries(sine(200, 10)), {});
  EXPECT_GT(s.ds, 1.5);
  EXPECT_EQ(s.label, dm::StochasticityLabel::NonStochastic);
}

TEST(ComputeDs, ConstantInput) {
  EXPECT_EQ(code_of([] { dm::compute_ds(nk::RealSeries(std::vector<double>(200, 1.0)), {}); }),
            ErrorCode::ConstantInput);
}

TEST(ComputeDs, CompositionIdentityAndInvariants) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto x = seed % 2 ? sine(180, 8 + seed, 0.3 * seed) : noise(180, seed);
    const auto r = dm::compute_ds(nk::RealSeries(x), {});
    EXPECT_NEAR(r.ds, r.cv1 * r.cv2 / 100.0, 1e-9);
    EXPECT_EQ(r.label, dm::classify_stochastic(r.ds));
    EXPECT_GE(r.kl_series.z.size(), 2u);
    for (const auto& [w, z] : r.kl_series.z) {
      EXPECT_GE(z, 0.0);
      EXPECT_TRUE(std::isfinite(z));
    }
    EXPECT_EQ(r.scales_used.size(), r.kl_series.z.size());
  }
}

TEST(ComputeDs, Deterministic) {
  const auto x = noise(150, 8);
  const auto a = dm::compute_ds(nk::RealSeries(x), {});
  const auto b = dm::compute_ds(nk::RealSeries(x), {});
  EXPECT_EQ(a.ds, b.ds);
  EXPECT_EQ(a.prominence_cov.values, b.prominence_cov.values);
}

TEST(ComputeDs, MatchesSingleFunctionReference) {
  dm::DsConfig cfg;
  for (std::uint64_t i = 0; i < 20; ++i) {
    ss::GeneratorSpec spec;
    spec.length = 150;
    spec.seed = 1000 + i;
    spec.kind = i % 4 == 0 ? ss::SignalKind::Sine
                : i % 4 == 1 ? ss::SignalKind::Ar1
                : i % 4 == 2 ? ss::SignalKind::Mix
                             : ss::SignalKind::WhiteNoise;
    spec.random_phase = true;
    const auto x = ss::generate(spec);
    cfg.ae.seed = i;
    const auto r = dm::compute_ds(x, cfg);
    const auto d = dm::learn_dissimilarity(x.values(), cfg);
    const auto ref = oracle::ds_reference(x.vec(), d.values, cfg.windowing.window_len, cfg.grid.window_sizes);

    ASSERT_EQ(r.kl_series.z.size(), ref.z.size()) << "series " << i;
    for (const auto& [w, z] : ref.z) EXPECT_NEAR(r.kl_series.z.at(w), z, 1e-9);
    ASSERT_EQ(r.prominence_cov.values.size(), ref.cov.size());
    for (std::size_t k = 0; k < ref.cov.size(); ++k) EXPECT_NEAR(r.prominence_cov.values[k], ref.cov[k], 1e-9);
    EXPECT_NEAR(r.cv1, ref.cv1, 1e-9);
    EXPECT_NEAR(r.cv2, ref.cv2, 1e-9);
    EXPECT_NEAR(r.ds, ref.ds, 1e-9);
  }
}

TEST(DsFromCurve, RemovingAScaleKeepsOtherKlValues) {
  const auto x = noise(200, 21);
  dm::DsConfig cfg;
  const auto d = dm::learn_dissimilarity(x, cfg);
  const auto full = dm::ds_from_curve(x, d.values, cfg.windowing, cfg.grid);
  for (std::size_t drop = 0; drop < cfg.grid.size(); ++drop) {
    dm::ScaleGrid g = cfg.grid;
    g.window_sizes.erase(g.window_sizes.begin() + static_cast<std::ptrdiff_t>(drop));
    const auto r = dm::ds_from_curve(x, d.values, cfg.windowing, g);
    for (const auto& [w, z] : r.kl_series.z) EXPECT_EQ(z, full.kl_series.z.at(w));
    EXPECT_EQ(r.kl_series.z.count(cfg.grid.window_sizes[drop]), 0u);
  }
}

TEST(ComputeDs, AmplitudeRobust) {
  for (const auto& x : {sine(200, 10), noise(200, 5)}) {
    const double base = ds_of(x);
    for (double c : {0.5, 2.0, 10.0}) {
      std::vector<double> y = x;
      for (auto& v : y) v *= c;
      EXPECT_LT(std::abs(ds_of(y) - base), 0.1 * base) << "scale " << c;
    }
  }
}

TEST(ComputeDs, SeparatesNoiseFromSines) {
  int correct = 0;
  const int per_class = 10;
  for (int i = 0; i < per_class; ++i) {
    ss::GeneratorSpec n;
    n.kind = ss::SignalKind::WhiteNoise;
    n.seed = 300 + i;
    if (ds_of(ss::generate(n).vec(), i) < 1.5) ++correct;
    ss::GeneratorSpec s;
    s.kind = ss::SignalKind::Sine;
    s.frequency = 0.1;
    s.random_phase = true;
    s.seed = 300 + i;
    if (ds_of(ss::generate(s).vec(), i) >= 1.5) ++correct;
  }
  EXPECT_GE(correct, 19);
}
