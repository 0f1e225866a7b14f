#include "dsm/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dsm/error.hpp"

namespace dsm::numkernel {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

ComplexSpectrum direct_transform(std::span<const std::complex<double>> x, double sign) {
  const std::size_t n = x.size();
  ComplexSpectrum out(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      // Reduce j*k modulo n before scaling so large lengths keep full precision.
      const double angle =
          sign * 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
      acc += x[k] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[j] = acc;
  }
  return out;
}

ComplexSpectrum radix2_transform(std::span<const std::complex<double>> x, double sign) {
  const std::size_t n = x.size();
  ComplexSpectrum a(x.begin(), x.end());

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const double angle =
            sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
        const std::complex<double> w(std::cos(angle), std::sin(angle));
        const auto u = a[start + k];
        const auto v = a[start + k + half] * w;
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
  return a;
}

ComplexSpectrum transform(std::span<const std::complex<double>> x, double sign, DftMethod method) {
  if (x.empty()) throw Error(ErrorCode::EmptyInput, "transform of an empty window");
  switch (method) {
    case DftMethod::Direct:
      return direct_transform(x, sign);
    case DftMethod::Radix2:
      if (!is_power_of_two(x.size()))
        throw Error(ErrorCode::InvalidParameter,
                    "radix-2 transform needs a power-of-two length, got " + std::to_string(x.size()));
      return radix2_transform(x, sign);
    case DftMethod::Auto:
      break;
  }
  return is_power_of_two(x.size()) ? radix2_transform(x, sign) : direct_transform(x, sign);
}

void require_finite(std::span<const double> xs, const char* what) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]))
      throw Error(ErrorCode::NonFiniteInput,
                  std::string(what) + ": non-finite value at index " + std::to_string(i));
  }
}

}  // namespace

RealSeries::RealSeries(std::vector<double> values, double sample_interval)
    : values_(std::move(values)), sample_interval_(sample_interval) {
  if (values_.empty()) throw Error(ErrorCode::EmptyInput, "series has no samples");
  if (!(sample_interval_ > 0.0) || !std::isfinite(sample_interval_))
    throw Error(ErrorCode::InvalidParameter, "sample interval must be positive");
  require_finite(values_, "series");
}

ComplexSpectrum dft(std::span<const double> window, DftMethod method) {
  std::vector<std::complex<double>> x(window.begin(), window.end());
  return transform(x, -1.0, method);
}

ComplexSpectrum dft(std::span<const std::complex<double>> window, DftMethod method) {
  return transform(window, -1.0, method);
}

ComplexSpectrum inverse_dft(std::span<const std::complex<double>> spectrum, DftMethod method) {
  auto out = transform(spectrum, +1.0, method);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<double> crop_modulus(std::span<const std::complex<double>> spectrum,
                                 std::size_t crop_len) {
  if (crop_len == 0 || crop_len > spectrum.size())
    throw Error(ErrorCode::CropOutOfRange, "crop length " + std::to_string(crop_len) +
                                               " outside [1, " + std::to_string(spectrum.size()) +
                                               "]");
  std::vector<double> out(crop_len);
  for (std::size_t i = 0; i < crop_len; ++i) out[i] = std::abs(spectrum[i]);
  return out;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::InsufficientData, "mean of an empty list");
  double sum = 0.0;
  for (double v : xs) sum += v;
  return sum / static_cast<double>(xs.size());
}

double population_std(std::span<const double> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double v : xs) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

double coefficient_of_variation(std::span<const double> xs) {
  if (xs.size() < 2)
    throw Error(ErrorCode::InsufficientData,
                "coefficient of variation needs at least 2 values, got " + std::to_string(xs.size()));
  const double m = mean(xs);
  if (!(std::abs(m) >= kMeanFloor))
    throw Error(ErrorCode::DegenerateStatistics, "mean magnitude below 1e-12");
  return population_std(xs) / m * 100.0;
}

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw Error(ErrorCode::EmptyInput, "empty probability vector");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p > 0.0) || !std::isfinite(p))
      throw Error(ErrorCode::ZeroSupport, "probability entries must be positive and finite");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidParameter, "probabilities sum to " + std::to_string(sum));
}

ProbVector normalize_to_distribution(std::span<const double> xs, double epsilon) {
  if (xs.size() < 2)
    throw Error(ErrorCode::InsufficientData, "distribution needs at least 2 values");
  if (!(epsilon > 0.0) || epsilon >= 1.0)
    throw Error(ErrorCode::InvalidParameter, "epsilon must lie in (0, 1)");
  require_finite(xs, "normalize_to_distribution");
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (range < 1e-12) throw Error(ErrorCode::ConstantSeries, "max - min below 1e-12");

  std::vector<double> out(xs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = epsilon + (1.0 - epsilon) * (xs[i] - lo) / range;
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return ProbVector(std::move(out));
}

double kl_divergence(const ProbVector& p, const ProbVector& q) {
  return kl_divergence(p.probs(), q.probs());
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw Error(ErrorCode::LengthMismatch, "KL operands have lengths " + std::to_string(p.size()) +
                                               " and " + std::to_string(q.size()));
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(q[i] > 0.0)) throw Error(ErrorCode::ZeroSupport, "q has non-positive entry");
    if (p[i] > 0.0) acc += p[i] * std::log(p[i] / q[i]);
  }
  // Rounding can leave a tiny negative sum for p ~= q.
  return std::max(acc, 0.0);
}

double peak_prominence(std::span<const double> xs, std::size_t peak_index) {
  const std::size_t n = xs.size();
  if (peak_index == 0 || peak_index + 1 >= n || !(xs[peak_index - 1] < xs[peak_index]) ||
      !(xs[peak_index] > xs[peak_index + 1]))
    throw Error(ErrorCode::NotAPeak, "index " + std::to_string(peak_index) +
                                         " is not a strict local maximum");
  const double height = xs[peak_index];

  double left_base = height;
  for (std::size_t i = peak_index; i-- > 0;) {
    if (xs[i] > height) break;
    left_base = std::min(left_base, xs[i]);
  }
  double right_base = height;
  for (std::size_t i = peak_index + 1; i < n; ++i) {
    if (xs[i] > height) break;
    right_base = std::min(right_base, xs[i]);
  }
  return height - std::max(left_base, right_base);
}

PeakList find_peaks(std::span<const double> xs) {
  if (xs.size() < 3)
    throw Error(ErrorCode::InsufficientData, "peak search needs at least 3 samples");
  PeakList peaks;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    if (xs[i - 1] < xs[i] && xs[i] > xs[i + 1]) {
      peaks.indices.push_back(i);
      peaks.prominences.push_back(peak_prominence(xs, i));
    }
  }
  return peaks;
}

}  // namespace dsm::numkernel
