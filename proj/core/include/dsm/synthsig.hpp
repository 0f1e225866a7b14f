#pragma once

// Seeded synthetic signal generators for threshold validation and
// desk-scale cohorts.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/numkernel.hpp"

namespace dsm::synthsig {

enum class SignalKind { WhiteNoise, Ar1, Flicker, Sine, LogisticMap, Mix };

std::string_view kind_name(SignalKind kind) noexcept;
/// Parses the snake_case names used on the command line; nullopt if unknown.
std::optional<SignalKind> parse_kind(std::string_view name) noexcept;

struct GeneratorSpec {
  SignalKind kind = SignalKind::WhiteNoise;
  std::size_t length = 200;
  std::uint64_t seed = 0;

  double phi = 0.5;          // ar1, |phi| < 1
  double frequency = 0.1;    // sine / mix, cycles per sample in (0, 0.5]
  double amplitude = 1.0;    // sine / mix, > 0
  double phase = 0.0;        // sine / mix, radians
  bool random_phase = false; // sine / mix: draw the phase from the seed instead
  double r = 4.0;            // logistic map, (0, 4]
  double x0 = 0.2;           // logistic map, (0, 1)
  double snr_db = 0.0;       // mix

  void validate() const;
};

/// Deterministic in spec (including seed).
numkernel::RealSeries generate(const GeneratorSpec& spec);

struct LabeledSeries {
  numkernel::RealSeries series;
  int label = 0;  ///< 0 for spec_a (HC), 1 for spec_b (AD)
  std::uint64_t seed = 0;
};

/// n_per_class series from each spec; series i of either class uses seed
/// base_seed + i. Class A entries come first.
std::vector<LabeledSeries> cohort(const GeneratorSpec& spec_a, const GeneratorSpec& spec_b,
                                  std::size_t n_per_class, std::uint64_t base_seed);

}  // namespace dsm::synthsig
