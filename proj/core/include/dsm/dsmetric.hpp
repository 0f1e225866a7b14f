#pragma once

// Multi-scale deviation-from-stochasticity measure: bias-corrected
// dissimilarity windows, per-scale KL divergence (CV1), windowed
// peak-prominence variation (CV2) and DS = CV1 * CV2 / 100.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/autoenc.hpp"
#include "dsm/numkernel.hpp"

namespace dsm::dsmetric {

struct ScaleGrid {
  std::vector<std::size_t> window_sizes;

  std::size_t size() const noexcept { return window_sizes.size(); }
  friend bool operator==(const ScaleGrid&, const ScaleGrid&) = default;
};

/// min, min+step, ... not exceeding max.
ScaleGrid scale_grid(std::size_t min, std::size_t step, std::size_t max);
/// 5, 7, ..., 49.
ScaleGrid default_scale_grid();

/// Mean of x over [t - w + 1, t].
double window_bias(std::span<const double> x, std::size_t t, std::size_t w);

struct BiasCorrectedCurve {
  std::vector<double> values;
  std::size_t scale = 0;
};

/// Partitions d into consecutive non-overlapping windows of length w (the
/// trailing remainder is dropped) and adds to each window the mean of
/// x_aligned over the same positions.
BiasCorrectedCurve bias_correct(std::span<const double> d, std::span<const double> x_aligned,
                                std::size_t w);

/// KL(normalize(x_aligned[0:n]) || normalize(d_tilde)), n = |d_tilde|.
double kl_per_scale(std::span<const double> x_aligned, const BiasCorrectedCurve& d_tilde);

struct KlSeries {
  std::map<std::size_t, double> z;  ///< scale -> KL value, ascending scale
};

double cv1(const KlSeries& zs);

struct ProminenceCov {
  struct ScaleRange {
    std::size_t scale = 0;
    std::size_t begin = 0;  ///< index into values
    std::size_t end = 0;    ///< one past the last value of this scale
  };
  std::vector<double> values;
  std::vector<ScaleRange> ranges;
};

/// For every scale not exceeding the number of prominences: CV of each
/// non-overlapping window, pooled into one array.
ProminenceCov prominence_cov(std::span<const double> prominences, const ScaleGrid& grid);

double cv2(const ProminenceCov& pc);

enum class StochasticityLabel { Stochastic, NonStochastic };

inline constexpr double kDefaultThreshold = 1.5;

/// Stochastic iff ds < threshold.
StochasticityLabel classify_stochastic(double ds, double threshold = kDefaultThreshold);
std::string_view label_name(StochasticityLabel label) noexcept;

/// Which curve the prominence statistics are taken from.
enum class PeakSource {
  Dissimilarity,  ///< peaks of the dissimilarity curve D
  Signal,         ///< peaks of the input series X
};

struct DsConfig {
  autoenc::WindowingConfig windowing;
  autoenc::AeConfig ae;
  ScaleGrid grid = default_scale_grid();
  double threshold = kDefaultThreshold;
  PeakSource peak_source = PeakSource::Dissimilarity;
};

/// Why a scale did not contribute to CV1 or CV2.
struct ScaleDiagnostic {
  std::size_t scale = 0;
  std::string stage;   ///< "kl" or "prominence"
  std::string reason;  ///< error code name
};

struct DsResult {
  double cv1 = 0.0;
  double cv2 = 0.0;
  double ds = 0.0;
  KlSeries kl_series;
  ProminenceCov prominence_cov;
  ScaleGrid scales_used;  ///< scales that produced a KL value
  StochasticityLabel label = StochasticityLabel::Stochastic;
  std::vector<ScaleDiagnostic> skipped;
  std::size_t peak_count = 0;
  double final_train_loss = 0.0;
};

/// The slice of x lined up with the dissimilarity curve: x[window_len - 1 + t]
/// for t in [0, curve_len).
std::vector<double> align_series(std::span<const double> x, std::size_t curve_len,
                                 const autoenc::WindowingConfig& windowing);

/// Everything downstream of the dissimilarity curve.
DsResult ds_from_curve(std::span<const double> x, std::span<const double> d,
                       const autoenc::WindowingConfig& windowing, const ScaleGrid& grid,
                       double threshold = kDefaultThreshold,
                       PeakSource peak_source = PeakSource::Dissimilarity);

/// Full pipeline: spectral windows -> standardize -> train -> encode -> D ->
/// ds_from_curve.
DsResult compute_ds(const numkernel::RealSeries& x, const DsConfig& cfg);

/// Convenience: the dissimilarity curve compute_ds() would use.
autoenc::DissimilarityCurve learn_dissimilarity(std::span<const double> x, const DsConfig& cfg,
                                                double* final_loss = nullptr);

}  // namespace dsm::dsmetric
