#include "dsm/synthsig.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "dsm/error.hpp"
#include "dsm/random.hpp"

namespace dsm::synthsig {

namespace {

std::vector<double> white_noise(std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  for (double& v : out) v = rng.normal();
  return out;
}

std::vector<double> sine(const GeneratorSpec& spec, Rng& rng) {
  const double phase =
      spec.random_phase ? rng.uniform(0.0, 2.0 * std::numbers::pi) : spec.phase;
  std::vector<double> out(spec.length);
  for (std::size_t t = 0; t < spec.length; ++t)
    out[t] = spec.amplitude *
             std::sin(2.0 * std::numbers::pi * spec.frequency * static_cast<double>(t) + phase);
  return out;
}

// White Gaussian noise with its spectrum shaped by 1/sqrt(f), i.e. power ~ 1/f.
std::vector<double> flicker(std::size_t n, Rng& rng) {
  const auto noise = white_noise(n, rng);
  auto spectrum = numkernel::dft(noise);
  spectrum[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const std::size_t k = std::min(j, n - j);
    spectrum[j] /= std::sqrt(static_cast<double>(k));
  }
  const auto back = numkernel::inverse_dft(spectrum);
  std::vector<double> out(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = back[i].real();
    ss += out[i] * out[i];
  }
  const double scale = 1.0 / std::sqrt(ss / static_cast<double>(n));
  for (double& v : out) v *= scale;
  return out;
}

double power(const std::vector<double>& v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  return ss / static_cast<double>(v.size());
}

}  // namespace

std::string_view kind_name(SignalKind kind) noexcept {
  switch (kind) {
    case SignalKind::WhiteNoise: return "white_noise";
    case SignalKind::Ar1: return "ar1";
    case SignalKind::Flicker: return "flicker";
    case SignalKind::Sine: return "sine";
    case SignalKind::LogisticMap: return "logistic_map";
    case SignalKind::Mix: return "mix";
  }
  return "unknown";
}

std::optional<SignalKind> parse_kind(std::string_view name) noexcept {
  for (auto k : {SignalKind::WhiteNoise, SignalKind::Ar1, SignalKind::Flicker, SignalKind::Sine,
                 SignalKind::LogisticMap, SignalKind::Mix}) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

void GeneratorSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidParameter, what); };
  if (length < 10) fail("length must be at least 10");
  switch (kind) {
    case SignalKind::Ar1:
      if (!(std::abs(phi) < 1.0)) fail("ar1 requires |phi| < 1");
      break;
    case SignalKind::Sine:
    case SignalKind::Mix:
      if (!(frequency > 0.0 && frequency <= 0.5)) fail("frequency must lie in (0, 0.5]");
      if (!(amplitude > 0.0) || !std::isfinite(amplitude)) fail("amplitude must be positive");
      if (!std::isfinite(phase)) fail("phase must be finite");
      if (kind == SignalKind::Mix && !std::isfinite(snr_db)) fail("snr_db must be finite");
      break;
    case SignalKind::LogisticMap:
      if (!(r > 0.0 && r <= 4.0)) fail("logistic map requires r in (0, 4]");
      if (!(x0 > 0.0 && x0 < 1.0)) fail("logistic map requires x0 in (0, 1)");
      break;
    case SignalKind::WhiteNoise:
    case SignalKind::Flicker:
      break;
  }
}

numkernel::RealSeries generate(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<double> out;
  switch (spec.kind) {
    case SignalKind::WhiteNoise:
      out = white_noise(spec.length, rng);
      break;
    case SignalKind::Ar1: {
      const auto eps = white_noise(spec.length, rng);
      out.resize(spec.length);
      out[0] = eps[0];
      for (std::size_t t = 1; t < spec.length; ++t) out[t] = spec.phi * out[t - 1] + eps[t];
      break;
    }
    case SignalKind::Flicker:
      out = flicker(spec.length, rng);
      break;
    case SignalKind::Sine:
      out = sine(spec, rng);
      break;
    case SignalKind::LogisticMap: {
      out.resize(spec.length);
      out[0] = spec.x0;
      for (std::size_t t = 1; t < spec.length; ++t)
        out[t] = spec.r * out[t - 1] * (1.0 - out[t - 1]);
      break;
    }
    case SignalKind::Mix: {
      out = sine(spec, rng);
      auto noise = white_noise(spec.length, rng);
      // Scale measured noise power so 10 log10(Ps / Pn) hits snr_db exactly.
      const double target = power(out) / std::pow(10.0, spec.snr_db / 10.0);
      const double scale = std::sqrt(target / power(noise));
      for (std::size_t t = 0; t < out.size(); ++t) out[t] += scale * noise[t];
      break;
    }
  }
  return numkernel::RealSeries(std::move(out));
}

std::vector<LabeledSeries> cohort(const GeneratorSpec& spec_a, const GeneratorSpec& spec_b,
                                  std::size_t n_per_class, std::uint64_t base_seed) {
  if (n_per_class == 0) throw Error(ErrorCode::InvalidParameter, "n_per_class must be positive");
  std::vector<LabeledSeries> out;
  out.reserve(2 * n_per_class);
  for (int label = 0; label < 2; ++label) {
    GeneratorSpec spec = label == 0 ? spec_a : spec_b;
    for (std::size_t i = 0; i < n_per_class; ++i) {
      spec.seed = base_seed + i;
      out.push_back({generate(spec), label, spec.seed});
    }
  }
  return out;
}

}  // namespace dsm::synthsig
