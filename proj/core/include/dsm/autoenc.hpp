#pragma once

// Windowed spectral features, a small tanh autoencoder trained with a
// reconstruction + time-invariance loss, and the dissimilarity curve built
// from consecutive latent codes.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dsm::autoenc {

struct WindowingConfig {
  std::size_t window_len = 20;
  std::size_t stride = 1;
  /// 0 selects the non-redundant half spectrum, window_len / 2 + 1.
  std::size_t crop_len = 0;

  std::size_t effective_crop_len() const noexcept {
    return crop_len == 0 ? window_len / 2 + 1 : crop_len;
  }
  void validate() const;
};

struct SpectralWindowSet {
  std::vector<std::vector<double>> features;
  std::vector<std::size_t> source_offsets;

  std::size_t size() const noexcept { return features.size(); }
  std::size_t dim() const noexcept { return features.empty() ? 0 : features.front().size(); }
};

/// Windows at offsets 0, stride, 2*stride, ... each mapped through
/// dft -> crop_modulus.
SpectralWindowSet make_spectral_windows(std::span<const double> x, const WindowingConfig& cfg);

/// Feature-wise z-scoring with population std floored at 1e-8.
SpectralWindowSet standardize_features(const SpectralWindowSet& windows);

struct AeConfig {
  std::size_t hidden_dim = 16;
  std::size_t latent_dim = 4;
  double learning_rate = 0.01;
  std::size_t epochs = 500;
  double invariance_weight = 0.1;
  std::uint64_t seed = 0;

  void validate(std::size_t input_dim) const;
};

/// Fully connected layer, weights stored row-major as out x in.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> biases;

  double w(std::size_t row, std::size_t col) const { return weights[row * in + col]; }
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// input -> hidden (tanh) -> latent (linear) -> hidden (tanh) -> output (linear)
struct AeModel {
  DenseLayer encoder_hidden;
  DenseLayer encoder_latent;
  DenseLayer decoder_hidden;
  DenseLayer decoder_output;

  std::size_t input_dim() const noexcept { return encoder_hidden.in; }
  std::size_t latent_dim() const noexcept { return encoder_latent.out; }

  /// Visits every layer in a fixed order (used for init, updates, gradient checks).
  template <typename F>
  void for_each_layer(F&& f) {
    f(encoder_hidden);
    f(encoder_latent);
    f(decoder_hidden);
    f(decoder_output);
  }
  template <typename F>
  void for_each_layer(F&& f) const {
    f(encoder_hidden);
    f(encoder_latent);
    f(decoder_hidden);
    f(decoder_output);
  }

  friend bool operator==(const AeModel&, const AeModel&) = default;
};

AeModel init_model(std::size_t input_dim, const AeConfig& cfg);

struct LossTerms {
  double reconstruction = 0.0;  ///< mean over windows of ||x_t - xhat_t||^2
  double invariance = 0.0;      ///< mean over t of ||f_t - f_{t-1}||^2
  double total = 0.0;           ///< reconstruction + lambda * invariance
};

LossTerms loss(const AeModel& model, const SpectralWindowSet& windows, double invariance_weight);

/// Analytic gradient of loss().total with respect to every parameter; the
/// result has the same shape as the model.
AeModel gradient(const AeModel& model, const SpectralWindowSet& windows, double invariance_weight,
                 LossTerms* terms_out = nullptr);

struct TrainLog {
  std::vector<double> total;
  std::vector<double> reconstruction;
  std::vector<double> invariance;
};

struct TrainResult {
  AeModel model;
  TrainLog log;
};

/// Full-batch gradient descent for cfg.epochs epochs. log[e] is the loss
/// evaluated before the e-th update.
TrainResult train(AeModel model, const SpectralWindowSet& windows, const AeConfig& cfg);

struct LatentTrace {
  std::vector<std::vector<double>> latents;
  std::size_t size() const noexcept { return latents.size(); }
};

LatentTrace encode(const AeModel& model, const SpectralWindowSet& windows);

struct Reconstruction {
  SpectralWindowSet windows;
  std::vector<double> squared_errors;
};

Reconstruction reconstruct(const AeModel& model, const SpectralWindowSet& windows);

struct DissimilarityCurve {
  std::vector<double> values;
  std::size_t size() const noexcept { return values.size(); }
};

/// D[t] = || latent[t+1] - latent[t] ||_2
DissimilarityCurve dissimilarity_curve(const LatentTrace& trace);

}  // namespace dsm::autoenc
