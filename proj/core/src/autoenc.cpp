#include "dsm/autoenc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsm/error.hpp"
#include "dsm/numkernel.hpp"
#include "dsm/random.hpp"

namespace dsm::autoenc {

namespace {

constexpr double kStdFloor = 1e-8;

void affine(const DenseLayer& layer, std::span<const double> x, std::span<double> out) {
  for (std::size_t r = 0; r < layer.out; ++r) {
    double acc = layer.biases[r];
    const double* row = layer.weights.data() + r * layer.in;
    for (std::size_t c = 0; c < layer.in; ++c) acc += row[c] * x[c];
    out[r] = acc;
  }
}

// dst += outer(delta, input); bias += delta
void accumulate_grad(DenseLayer& grad, std::span<const double> delta, std::span<const double> input) {
  for (std::size_t r = 0; r < grad.out; ++r) {
    double* row = grad.weights.data() + r * grad.in;
    for (std::size_t c = 0; c < grad.in; ++c) row[c] += delta[r] * input[c];
    grad.biases[r] += delta[r];
  }
}

// out = W^T delta
void backprop(const DenseLayer& layer, std::span<const double> delta, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t r = 0; r < layer.out; ++r) {
    const double* row = layer.weights.data() + r * layer.in;
    for (std::size_t c = 0; c < layer.in; ++c) out[c] += row[c] * delta[r];
  }
}

DenseLayer zero_like(const DenseLayer& layer) {
  DenseLayer z;
  z.in = layer.in;
  z.out = layer.out;
  z.weights.assign(layer.weights.size(), 0.0);
  z.biases.assign(layer.biases.size(), 0.0);
  return z;
}

struct Activations {
  std::vector<std::vector<double>> hidden_enc;
  std::vector<std::vector<double>> latent;
  std::vector<std::vector<double>> hidden_dec;
  std::vector<std::vector<double>> output;
};

void check_dims(const AeModel& model, const SpectralWindowSet& windows) {
  for (const auto& f : windows.features) {
    if (f.size() != model.input_dim())
      throw Error(ErrorCode::DimensionMismatch, "window feature length " + std::to_string(f.size()) +
                                                    " vs model input " +
                                                    std::to_string(model.input_dim()));
  }
}

Activations forward(const AeModel& m, const SpectralWindowSet& windows) {
  check_dims(m, windows);
  const std::size_t n = windows.size();
  Activations a;
  a.hidden_enc.assign(n, std::vector<double>(m.encoder_hidden.out));
  a.latent.assign(n, std::vector<double>(m.encoder_latent.out));
  a.hidden_dec.assign(n, std::vector<double>(m.decoder_hidden.out));
  a.output.assign(n, std::vector<double>(m.decoder_output.out));
  for (std::size_t t = 0; t < n; ++t) {
    affine(m.encoder_hidden, windows.features[t], a.hidden_enc[t]);
    for (double& v : a.hidden_enc[t]) v = std::tanh(v);
    affine(m.encoder_latent, a.hidden_enc[t], a.latent[t]);
    affine(m.decoder_hidden, a.latent[t], a.hidden_dec[t]);
    for (double& v : a.hidden_dec[t]) v = std::tanh(v);
    affine(m.decoder_output, a.hidden_dec[t], a.output[t]);
  }
  return a;
}

LossTerms loss_from(const Activations& a, const SpectralWindowSet& windows, double lambda) {
  const std::size_t n = windows.size();
  LossTerms terms;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < windows.features[t].size(); ++i) {
      const double e = a.output[t][i] - windows.features[t][i];
      terms.reconstruction += e * e;
    }
  }
  terms.reconstruction /= static_cast<double>(n);
  if (n > 1) {
    for (std::size_t t = 1; t < n; ++t) {
      for (std::size_t i = 0; i < a.latent[t].size(); ++i) {
        const double e = a.latent[t][i] - a.latent[t - 1][i];
        terms.invariance += e * e;
      }
    }
    terms.invariance /= static_cast<double>(n - 1);
  }
  terms.total = terms.reconstruction + lambda * terms.invariance;
  return terms;
}

}  // namespace

void WindowingConfig::validate() const {
  if (window_len == 0 || stride == 0)
    throw Error(ErrorCode::InvalidParameter, "window_len and stride must be positive");
  if (stride > window_len) throw Error(ErrorCode::InvalidParameter, "stride exceeds window_len");
  const auto crop = effective_crop_len();
  if (crop == 0 || crop > window_len)
    throw Error(ErrorCode::CropOutOfRange, "crop_len must lie in [1, window_len]");
}

SpectralWindowSet make_spectral_windows(std::span<const double> x, const WindowingConfig& cfg) {
  cfg.validate();
  if (x.size() < cfg.window_len + cfg.stride)
    throw Error(ErrorCode::SeriesTooShort,
                "series of length " + std::to_string(x.size()) + " yields fewer than 2 windows");
  SpectralWindowSet set;
  const auto crop = cfg.effective_crop_len();
  for (std::size_t offset = 0; offset + cfg.window_len <= x.size(); offset += cfg.stride) {
    const auto spectrum = numkernel::dft(x.subspan(offset, cfg.window_len));
    set.features.push_back(numkernel::crop_modulus(spectrum, crop));
    set.source_offsets.push_back(offset);
  }
  return set;
}

SpectralWindowSet standardize_features(const SpectralWindowSet& windows) {
  if (windows.size() == 0) throw Error(ErrorCode::EmptyInput, "no windows to standardize");
  const std::size_t d = windows.dim();
  const double n = static_cast<double>(windows.size());
  std::vector<double> mu(d, 0.0), sd(d, 0.0);
  for (const auto& f : windows.features)
    for (std::size_t i = 0; i < d; ++i) mu[i] += f[i];
  for (auto& v : mu) v /= n;
  for (const auto& f : windows.features)
    for (std::size_t i = 0; i < d; ++i) sd[i] += (f[i] - mu[i]) * (f[i] - mu[i]);
  for (auto& v : sd) v = std::max(std::sqrt(v / n), kStdFloor);

  SpectralWindowSet out = windows;
  for (auto& f : out.features)
    for (std::size_t i = 0; i < d; ++i) f[i] = (f[i] - mu[i]) / sd[i];
  return out;
}

void AeConfig::validate(std::size_t input_dim) const {
  if (hidden_dim == 0 || latent_dim == 0 || epochs == 0)
    throw Error(ErrorCode::InvalidParameter, "hidden_dim, latent_dim and epochs must be positive");
  if (latent_dim >= input_dim)
    throw Error(ErrorCode::InvalidParameter, "latent_dim must be smaller than the feature length");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw Error(ErrorCode::InvalidParameter, "learning_rate must be non-negative");
  if (!(invariance_weight >= 0.0) || !std::isfinite(invariance_weight))
    throw Error(ErrorCode::InvalidParameter, "invariance_weight must be non-negative");
}

AeModel init_model(std::size_t input_dim, const AeConfig& cfg) {
  cfg.validate(input_dim);
  Rng rng(cfg.seed);
  auto make = [&rng](std::size_t in, std::size_t out) {
    DenseLayer layer;
    layer.in = in;
    layer.out = out;
    layer.weights.resize(in * out);
    layer.biases.assign(out, 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& w : layer.weights) w = rng.uniform(-bound, bound);
    return layer;
  };
  AeModel m;
  m.encoder_hidden = make(input_dim, cfg.hidden_dim);
  m.encoder_latent = make(cfg.hidden_dim, cfg.latent_dim);
  m.decoder_hidden = make(cfg.latent_dim, cfg.hidden_dim);
  m.decoder_output = make(cfg.hidden_dim, input_dim);
  return m;
}

LossTerms loss(const AeModel& model, const SpectralWindowSet& windows, double invariance_weight) {
  if (windows.size() == 0) throw Error(ErrorCode::EmptyInput, "no windows");
  return loss_from(forward(model, windows), windows, invariance_weight);
}

AeModel gradient(const AeModel& m, const SpectralWindowSet& windows, double lambda,
                 LossTerms* terms_out) {
  if (windows.size() == 0) throw Error(ErrorCode::EmptyInput, "no windows");
  const auto a = forward(m, windows);
  if (terms_out) *terms_out = loss_from(a, windows, lambda);

  const std::size_t n = windows.size();
  const double recon_scale = 2.0 / static_cast<double>(n);
  const double inv_scale = n > 1 ? 2.0 * lambda / static_cast<double>(n - 1) : 0.0;

  AeModel g;
  g.encoder_hidden = zero_like(m.encoder_hidden);
  g.encoder_latent = zero_like(m.encoder_latent);
  g.decoder_hidden = zero_like(m.decoder_hidden);
  g.decoder_output = zero_like(m.decoder_output);

  std::vector<double> d_out(m.decoder_output.out), d_hdec(m.decoder_hidden.out),
      d_lat(m.encoder_latent.out), d_henc(m.encoder_hidden.out);

  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < d_out.size(); ++i)
      d_out[i] = recon_scale * (a.output[t][i] - windows.features[t][i]);
    accumulate_grad(g.decoder_output, d_out, a.hidden_dec[t]);

    backprop(m.decoder_output, d_out, d_hdec);
    for (std::size_t i = 0; i < d_hdec.size(); ++i)
      d_hdec[i] *= 1.0 - a.hidden_dec[t][i] * a.hidden_dec[t][i];
    accumulate_grad(g.decoder_hidden, d_hdec, a.latent[t]);

    backprop(m.decoder_hidden, d_hdec, d_lat);
    for (std::size_t i = 0; i < d_lat.size(); ++i) {
      if (t > 0) d_lat[i] += inv_scale * (a.latent[t][i] - a.latent[t - 1][i]);
      if (t + 1 < n) d_lat[i] -= inv_scale * (a.latent[t + 1][i] - a.latent[t][i]);
    }
    accumulate_grad(g.encoder_latent, d_lat, a.hidden_enc[t]);

    backprop(m.encoder_latent, d_lat, d_henc);
    for (std::size_t i = 0; i < d_henc.size(); ++i)
      d_henc[i] *= 1.0 - a.hidden_enc[t][i] * a.hidden_enc[t][i];
    accumulate_grad(g.encoder_hidden, d_henc, windows.features[t]);
  }
  return g;
}

TrainResult train(AeModel model, const SpectralWindowSet& windows, const AeConfig& cfg) {
  if (windows.size() < 2)
    throw Error(ErrorCode::InsufficientData, "training needs at least 2 windows");
  cfg.validate(model.input_dim());
  check_dims(model, windows);

  TrainLog log;
  log.total.reserve(cfg.epochs);
  log.reconstruction.reserve(cfg.epochs);
  log.invariance.reserve(cfg.epochs);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    LossTerms terms;
    const AeModel g = gradient(model, windows, cfg.invariance_weight, &terms);
    if (!std::isfinite(terms.total))
      throw Error(ErrorCode::DivergedTraining,
                  "non-finite loss at epoch " + std::to_string(epoch));
    log.total.push_back(terms.total);
    log.reconstruction.push_back(terms.reconstruction);
    log.invariance.push_back(terms.invariance);

    if (cfg.learning_rate == 0.0) continue;
    auto step = [lr = cfg.learning_rate](DenseLayer& p, const DenseLayer& d) {
      for (std::size_t i = 0; i < p.weights.size(); ++i) p.weights[i] -= lr * d.weights[i];
      for (std::size_t i = 0; i < p.biases.size(); ++i) p.biases[i] -= lr * d.biases[i];
    };
    step(model.encoder_hidden, g.encoder_hidden);
    step(model.encoder_latent, g.encoder_latent);
    step(model.decoder_hidden, g.decoder_hidden);
    step(model.decoder_output, g.decoder_output);
  }
  return {std::move(model), std::move(log)};
}

LatentTrace encode(const AeModel& model, const SpectralWindowSet& windows) {
  check_dims(model, windows);
  LatentTrace trace;
  trace.latents.reserve(windows.size());
  std::vector<double> hidden(model.encoder_hidden.out);
  for (const auto& f : windows.features) {
    affine(model.encoder_hidden, f, hidden);
    for (double& v : hidden) v = std::tanh(v);
    std::vector<double> z(model.encoder_latent.out);
    affine(model.encoder_latent, hidden, z);
    trace.latents.push_back(std::move(z));
  }
  return trace;
}

Reconstruction reconstruct(const AeModel& model, const SpectralWindowSet& windows) {
  const auto a = forward(model, windows);
  Reconstruction r;
  r.windows.source_offsets = windows.source_offsets;
  r.windows.features = a.output;
  r.squared_errors.reserve(windows.size());
  for (std::size_t t = 0; t < windows.size(); ++t) {
    double e = 0.0;
    for (std::size_t i = 0; i < windows.features[t].size(); ++i) {
      const double diff = a.output[t][i] - windows.features[t][i];
      e += diff * diff;
    }
    r.squared_errors.push_back(e);
  }
  return r;
}

DissimilarityCurve dissimilarity_curve(const LatentTrace& trace) {
  if (trace.size() < 2)
    throw Error(ErrorCode::InsufficientData, "dissimilarity needs at least 2 latents");
  DissimilarityCurve d;
  d.values.reserve(trace.size() - 1);
  for (std::size_t t = 0; t + 1 < trace.size(); ++t) {
    const auto& a = trace.latents[t];
    const auto& b = trace.latents[t + 1];
    if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "ragged latent trace");
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ss += (b[i] - a[i]) * (b[i] - a[i]);
    d.values.push_back(std::sqrt(ss));
  }
  return d;
}

}  // namespace dsm::autoenc
