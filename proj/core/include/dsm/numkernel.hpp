#pragma once

// Deterministic numeric primitives: DFT, descriptive statistics,
// discrete KL divergence, peak detection and topographic prominence.
// Everything here is a pure function of its arguments.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dsm::numkernel {

/// Uniformly sampled real-valued signal. Values are guaranteed finite and
/// non-empty once constructed.
class RealSeries {
 public:
  RealSeries() = default;
  explicit RealSeries(std::vector<double> values, double sample_interval = 1.0);

  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vec() const noexcept { return values_; }
  double sample_interval() const noexcept { return sample_interval_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
  double sample_interval_ = 1.0;
};

using ComplexSpectrum = std::vector<std::complex<double>>;

enum class DftMethod {
  Auto,    ///< radix-2 when the length is a power of two, direct otherwise
  Direct,  ///< O(n^2) summation of the definition
  Radix2,  ///< iterative Cooley-Tukey; length must be a power of two
};

/// bin[j] = sum_n x[n] exp(-2 pi i j n / N)
ComplexSpectrum dft(std::span<const double> window, DftMethod method = DftMethod::Auto);
ComplexSpectrum dft(std::span<const std::complex<double>> window,
                    DftMethod method = DftMethod::Auto);

/// Inverse of dft(), including the 1/N factor.
ComplexSpectrum inverse_dft(std::span<const std::complex<double>> spectrum,
                            DftMethod method = DftMethod::Auto);

/// Moduli of the first crop_len bins.
std::vector<double> crop_modulus(std::span<const std::complex<double>> spectrum,
                                 std::size_t crop_len);

double mean(std::span<const double> xs);
/// Population standard deviation (divides by N).
double population_std(std::span<const double> xs);

/// Threshold below which |mean| is treated as zero by coefficient_of_variation.
inline constexpr double kMeanFloor = 1e-12;

/// (population std / mean) * 100.
double coefficient_of_variation(std::span<const double> xs);

/// Strictly positive probability vector summing to one.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> probs);

  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

inline constexpr double kDefaultDistributionFloor = 1e-8;

/// Min-max rescale to [epsilon, 1] then divide by the sum.
ProbVector normalize_to_distribution(std::span<const double> xs,
                                     double epsilon = kDefaultDistributionFloor);

/// sum p_i ln(p_i / q_i), in nats.
double kl_divergence(const ProbVector& p, const ProbVector& q);
/// Unchecked-type overload; validates lengths and support.
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct PeakList {
  std::vector<std::size_t> indices;
  std::vector<double> prominences;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
};

/// Strict local maxima (x[i-1] < x[i] > x[i+1]) with their prominences.
/// Plateaus never qualify.
PeakList find_peaks(std::span<const double> xs);

/// Topographic prominence of a strict local maximum: height above the higher
/// of the two bases, where a base is the minimum between the peak and the
/// nearest strictly higher sample on that side (or the series end).
double peak_prominence(std::span<const double> xs, std::size_t peak_index);

}  // namespace dsm::numkernel
