#include "dsm/dsmetric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsm/error.hpp"

namespace dsm::dsmetric {

namespace nk = dsm::numkernel;

ScaleGrid scale_grid(std::size_t min, std::size_t step, std::size_t max) {
  if (min < 2 || step < 1)
    throw Error(ErrorCode::InvalidParameter, "scale grid needs min >= 2 and step >= 1");
  if (max < min) throw Error(ErrorCode::EmptyGrid, "scale grid max below min");
  ScaleGrid g;
  for (std::size_t w = min; w <= max; w += step) g.window_sizes.push_back(w);
  return g;
}

ScaleGrid default_scale_grid() { return scale_grid(5, 2, 50); }

double window_bias(std::span<const double> x, std::size_t t, std::size_t w) {
  if (w == 0 || t + 1 < w || t >= x.size())
    throw Error(ErrorCode::WindowOutOfRange, "window [" + std::to_string(t + 1) + "-" +
                                                 std::to_string(w) + ", " + std::to_string(t) +
                                                 "] outside series of length " +
                                                 std::to_string(x.size()));
  return nk::mean(x.subspan(t + 1 - w, w));
}

BiasCorrectedCurve bias_correct(std::span<const double> d, std::span<const double> x_aligned,
                                std::size_t w) {
  if (w == 0) throw Error(ErrorCode::InvalidParameter, "scale must be positive");
  if (x_aligned.size() != d.size())
    throw Error(ErrorCode::LengthMismatch, "aligned series and curve differ in length");
  if (d.size() < w)
    throw Error(ErrorCode::CurveShorterThanScale, "curve of length " + std::to_string(d.size()) +
                                                      " shorter than scale " + std::to_string(w));
  BiasCorrectedCurve out;
  out.scale = w;
  const std::size_t windows = d.size() / w;
  out.values.reserve(windows * w);
  for (std::size_t k = 0; k < windows; ++k) {
    const std::size_t t = (k + 1) * w - 1;
    const double b = window_bias(x_aligned, t, w);
    for (std::size_t j = t + 1 - w; j <= t; ++j) out.values.push_back(d[j] + b);
  }
  return out;
}

double kl_per_scale(std::span<const double> x_aligned, const BiasCorrectedCurve& d_tilde) {
  if (x_aligned.size() < d_tilde.values.size())
    throw Error(ErrorCode::LengthMismatch, "aligned series shorter than corrected curve");
  const auto x = x_aligned.first(d_tilde.values.size());
  const auto p = nk::normalize_to_distribution(x);
  const auto q = nk::normalize_to_distribution(d_tilde.values);
  return nk::kl_divergence(p, q);
}

double cv1(const KlSeries& zs) {
  if (zs.z.size() < 2)
    throw Error(ErrorCode::InsufficientScales,
                "CV1 needs at least 2 scales, got " + std::to_string(zs.z.size()));
  std::vector<double> values;
  values.reserve(zs.z.size());
  for (const auto& [scale, z] : zs.z) values.push_back(z);
  return nk::coefficient_of_variation(values);
}

ProminenceCov prominence_cov(std::span<const double> prominences, const ScaleGrid& grid) {
  ProminenceCov pc;
  for (const std::size_t w : grid.window_sizes) {
    if (w > prominences.size()) continue;
    ProminenceCov::ScaleRange range{w, pc.values.size(), pc.values.size()};
    for (std::size_t start = 0; start + w <= prominences.size(); start += w)
      pc.values.push_back(nk::coefficient_of_variation(prominences.subspan(start, w)));
    range.end = pc.values.size();
    pc.ranges.push_back(range);
  }
  if (pc.ranges.empty())
    throw Error(ErrorCode::NoUsableScales, "every scale exceeds the " +
                                               std::to_string(prominences.size()) +
                                               " available prominences");
  return pc;
}

double cv2(const ProminenceCov& pc) {
  if (pc.values.size() < 2)
    throw Error(ErrorCode::InsufficientData,
                "CV2 needs at least 2 values, got " + std::to_string(pc.values.size()));
  return nk::coefficient_of_variation(pc.values);
}

StochasticityLabel classify_stochastic(double ds, double threshold) {
  if (!std::isfinite(ds) || !std::isfinite(threshold))
    throw Error(ErrorCode::NonFiniteInput, "DS value and threshold must be finite");
  return ds < threshold ? StochasticityLabel::Stochastic : StochasticityLabel::NonStochastic;
}

std::string_view label_name(StochasticityLabel label) noexcept {
  return label == StochasticityLabel::Stochastic ? "stochastic" : "non-stochastic";
}

std::vector<double> align_series(std::span<const double> x, std::size_t curve_len,
                                 const autoenc::WindowingConfig& windowing) {
  const std::size_t offset = windowing.window_len - 1;
  if (offset + curve_len > x.size())
    throw Error(ErrorCode::LengthMismatch, "series too short to align with the curve");
  const auto slice = x.subspan(offset, curve_len);
  return {slice.begin(), slice.end()};
}

DsResult ds_from_curve(std::span<const double> x, std::span<const double> d,
                       const autoenc::WindowingConfig& windowing, const ScaleGrid& grid,
                       double threshold, PeakSource peak_source) {
  if (grid.window_sizes.empty()) throw Error(ErrorCode::EmptyGrid, "no scales");
  const auto x_raw = align_series(x, d.size(), windowing);
  {
    const auto [lo, hi] = std::minmax_element(x_raw.begin(), x_raw.end());
    if (*hi - *lo < 1e-12) throw Error(ErrorCode::ConstantInput, "aligned input is constant");
  }
  // X enters the bias and the KL term through its distribution embedding.
  const auto x_dist = nk::normalize_to_distribution(x_raw);
  const std::vector<double> x_aligned(x_dist.probs().begin(), x_dist.probs().end());

  DsResult r;
  for (const std::size_t w : grid.window_sizes) {
    if (d.size() < w) {
      r.skipped.push_back({w, "kl", std::string(error_code_name(ErrorCode::CurveShorterThanScale))});
      continue;
    }
    try {
      const auto d_tilde = bias_correct(d, x_aligned, w);
      r.kl_series.z[w] = kl_per_scale(x_aligned, d_tilde);
      r.scales_used.window_sizes.push_back(w);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConstantSeries) throw;
      r.skipped.push_back({w, "kl", std::string(error_code_name(e.code()))});
    }
  }
  r.cv1 = cv1(r.kl_series);

  const auto peak_curve = peak_source == PeakSource::Dissimilarity ? d : x;
  const auto peaks = nk::find_peaks(peak_curve);
  r.peak_count = peaks.size();
  for (const std::size_t w : grid.window_sizes) {
    if (w > peaks.size())
      r.skipped.push_back({w, "prominence", std::string(error_code_name(ErrorCode::NoUsableScales))});
  }
  r.prominence_cov = prominence_cov(peaks.prominences, grid);
  r.cv2 = cv2(r.prominence_cov);

  r.ds = r.cv1 * r.cv2 / 100.0;
  r.label = classify_stochastic(r.ds, threshold);
  return r;
}

autoenc::DissimilarityCurve learn_dissimilarity(std::span<const double> x, const DsConfig& cfg,
                                                double* final_loss) {
  const auto raw = autoenc::make_spectral_windows(x, cfg.windowing);
  const auto windows = autoenc::standardize_features(raw);
  auto trained = autoenc::train(autoenc::init_model(windows.dim(), cfg.ae), windows, cfg.ae);
  if (final_loss) *final_loss = trained.log.total.back();
  return autoenc::dissimilarity_curve(autoenc::encode(trained.model, windows));
}

DsResult compute_ds(const numkernel::RealSeries& x, const DsConfig& cfg) {
  const auto values = x.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi - *lo < 1e-12) throw Error(ErrorCode::ConstantInput, "input series is constant");

  double final_loss = 0.0;
  const auto d = learn_dissimilarity(values, cfg, &final_loss);
  auto r = ds_from_curve(values, d.values, cfg.windowing, cfg.grid, cfg.threshold, cfg.peak_source);
  r.final_train_loss = final_loss;
  return r;
}

}  // namespace dsm::dsmetric
