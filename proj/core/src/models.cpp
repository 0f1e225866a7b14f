#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsm/error.hpp"
#include "dsm/mlharness.hpp"
#include "dsm/random.hpp"

namespace dsm::mlharness {

namespace {

constexpr double kScaleFloor = 1e-12;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-m)) without overflow.
double softplus_neg(double m) {
  return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

FeatureMatrix standardize(const FeatureMatrix& x, const TrainedModel& model) {
  if (x.cols() != model.input_dim())
    throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(model.input_dim()) +
                                                  " features, got " + std::to_string(x.cols()));
  std::vector<double> z(x.values().begin(), x.values().end());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c)
      z[r * x.cols() + c] = (z[r * x.cols() + c] - model.feature_mean[c]) / model.feature_scale[c];
  return FeatureMatrix(x.feature_names(), x.row_ids(), std::move(z));
}

void fit_standardizer(const FeatureMatrix& x, TrainedModel& model) {
  model.feature_mean.assign(x.cols(), 0.0);
  model.feature_scale.assign(x.cols(), 1.0);
  const double n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) m += x(r, c);
    m /= n;
    double ss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) ss += (x(r, c) - m) * (x(r, c) - m);
    const double sd = std::sqrt(ss / n);
    model.feature_mean[c] = m;
    model.feature_scale[c] = sd > kScaleFloor ? sd : 1.0;
  }
}

double linear_score(const TrainedModel& m, std::span<const double> z) {
  double s = m.intercept;
  for (std::size_t i = 0; i < z.size(); ++i) s += m.weights[i] * z[i];
  return s;
}

void train_logistic(const ModelSpec& spec, const FeatureMatrix& z, const LabelVector& y,
                    TrainedModel& model) {
  std::vector<double> params(z.cols() + 1, 0.0);
  for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    const auto g = detail::logistic_gradient(params, z, y, spec.l2);
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= spec.learning_rate * g[i];
  }
  const double final_loss = detail::logistic_objective(params, z, y, spec.l2);
  if (!std::isfinite(final_loss)) throw Error(ErrorCode::NonFiniteLoss, "logistic loss diverged");
  model.weights.assign(params.begin(), params.end() - 1);
  model.intercept = params.back();
}

// Subgradient descent on mean hinge loss + (l2/2)||w||^2 with labels in {-1, +1}.
void train_svm(const ModelSpec& spec, const FeatureMatrix& z, const LabelVector& y,
               TrainedModel& model) {
  const std::size_t n = z.rows(), d = z.cols();
  std::vector<double> w(d, 0.0), gw(d);
  double b = 0.0;
  for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    for (std::size_t i = 0; i < d; ++i) gw[i] = spec.l2 * w[i];
    double gb = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double t = y[r] == 1 ? 1.0 : -1.0;
      const auto row = z.row(r);
      double m = b;
      for (std::size_t i = 0; i < d; ++i) m += w[i] * row[i];
      if (t * m < 1.0) {
        for (std::size_t i = 0; i < d; ++i) gw[i] -= t * row[i] / static_cast<double>(n);
        gb -= t / static_cast<double>(n);
      }
    }
    for (std::size_t i = 0; i < d; ++i) w[i] -= spec.learning_rate * gw[i];
    b -= spec.learning_rate * gb;
  }
  for (double v : w)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteLoss, "SVM weights diverged");
  model.weights = std::move(w);
  model.intercept = b;
}

void train_forest(const ModelSpec& spec, const FeatureMatrix& z, const LabelVector& y,
                  TrainedModel& model) {
  Rng rng(spec.seed);
  trees::TreeParams params;
  params.max_depth = spec.max_depth;
  params.max_features = spec.max_features != 0
                            ? spec.max_features
                            : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                           std::floor(std::sqrt(static_cast<double>(z.cols())))));
  const auto view = z.view();
  std::vector<std::size_t> sample(z.rows());
  for (std::size_t t = 0; t < spec.n_trees; ++t) {
    for (auto& s : sample) s = static_cast<std::size_t>(rng.uniform_index(z.rows()));
    model.trees.push_back(trees::grow_gini_tree(view, y, sample, params, rng));
  }
}

// Stagewise logistic boosting. Tree structure is fit to the negative gradient
// on a row subsample; each leaf then takes a shrunken Newton step computed on
// every training row in that leaf, halved until the leaf's loss does not rise.
void train_boosting(const ModelSpec& spec, const FeatureMatrix& z, const LabelVector& y,
                    TrainedModel& model) {
  const std::size_t n = z.rows();
  double pos = 0.0;
  for (int v : y) pos += v;
  const double prior = pos / static_cast<double>(n);
  model.base_score = std::log(prior / (1.0 - prior));

  Rng rng(spec.seed);
  trees::TreeParams params;
  params.max_depth = spec.max_depth;
  const auto view = z.view();

  std::vector<double> f(n, model.base_score), residual(n);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const std::size_t take =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(spec.subsample * static_cast<double>(n))), 2, n);

  for (std::size_t stage = 0; stage < spec.n_trees; ++stage) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - sigmoid(f[i]);
    std::vector<std::size_t> sample = rows;
    if (take < n) {
      rng.shuffle(sample);
      sample.resize(take);
      std::sort(sample.begin(), sample.end());
    }
    auto tree = trees::grow_regression_tree(view, residual, sample, params, rng);

    std::vector<std::vector<std::size_t>> members(tree.nodes.size());
    for (std::size_t i = 0; i < n; ++i) members[tree.leaf_index(z.row(i))].push_back(i);

    for (std::size_t leaf = 0; leaf < tree.nodes.size(); ++leaf) {
      if (!tree.nodes[leaf].is_leaf()) continue;
      const auto& idx = members[leaf];
      if (idx.empty()) {
        tree.nodes[leaf].value = 0.0;
        continue;
      }
      double g = 0.0, h = 0.0, before = 0.0;
      for (auto i : idx) {
        const double p = sigmoid(f[i]);
        g += y[i] - p;
        h += p * (1.0 - p);
        before += softplus_neg((y[i] == 1 ? 1.0 : -1.0) * f[i]);
      }
      double step = spec.learning_rate * g / std::max(h, 1e-12);
      for (int halving = 0; halving < 60; ++halving) {
        double after = 0.0;
        for (auto i : idx) after += softplus_neg((y[i] == 1 ? 1.0 : -1.0) * (f[i] + step));
        if (after <= before) break;
        step *= 0.5;
        if (halving == 59) step = 0.0;
      }
      tree.nodes[leaf].value = step;
    }
    for (std::size_t i = 0; i < n; ++i) f[i] += tree.predict(z.row(i));
    model.trees.push_back(std::move(tree));
  }
  for (double v : f)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteLoss, "boosting scores diverged");
}

}  // namespace

std::string_view kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Logistic: return "logistic";
    case ModelKind::LinearSvm: return "linear_svm";
    case ModelKind::RandomForest: return "random_forest";
    case ModelKind::GradientBoosting: return "gradient_boosting";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  for (auto k : {ModelKind::Logistic, ModelKind::LinearSvm, ModelKind::RandomForest,
                 ModelKind::GradientBoosting})
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

ModelSpec ModelSpec::defaults(ModelKind kind) {
  ModelSpec s;
  s.kind = kind;
  switch (kind) {
    case ModelKind::Logistic:
      s.learning_rate = 0.1;
      s.epochs = 2000;
      s.l2 = 1e-3;
      break;
    case ModelKind::LinearSvm:
      s.learning_rate = 0.05;
      s.epochs = 2000;
      s.l2 = 1e-3;
      break;
    case ModelKind::RandomForest:
      s.n_trees = 200;
      s.max_depth = 6;
      break;
    case ModelKind::GradientBoosting:
      s.n_trees = 200;
      s.max_depth = 3;
      s.learning_rate = 0.1;
      s.subsample = 0.8;
      break;
  }
  return s;
}

void ModelSpec::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidParameter, m); };
  switch (kind) {
    case ModelKind::Logistic:
    case ModelKind::LinearSvm:
      if (!(learning_rate > 0.0) || epochs == 0) fail("linear models need learning_rate > 0 and epochs > 0");
      if (!(l2 >= 0.0)) fail("l2 must be non-negative");
      break;
    case ModelKind::RandomForest:
      if (n_trees == 0 || max_depth == 0) fail("forest needs n_trees > 0 and max_depth > 0");
      break;
    case ModelKind::GradientBoosting:
      if (n_trees == 0 || max_depth == 0) fail("boosting needs n_trees > 0 and max_depth > 0");
      if (!(learning_rate > 0.0)) fail("boosting needs learning_rate > 0");
      if (!(subsample > 0.0 && subsample <= 1.0)) fail("subsample must lie in (0, 1]");
      break;
  }
}

TrainedModel train(const ModelSpec& spec, const FeatureMatrix& x, const LabelVector& y) {
  spec.validate();
  if (y.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "labels vs rows");
  std::size_t pos = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorCode::InvalidParameter, "labels must be 0 or 1");
    pos += static_cast<std::size_t>(v);
  }
  if (pos < 2 || x.rows() - pos < 2)
    throw Error(ErrorCode::SingleClassTraining, "training needs at least 2 samples of each class");

  TrainedModel model;
  model.kind = spec.kind;
  model.spec = spec;
  model.feature_names = x.feature_names();
  fit_standardizer(x, model);
  const auto z = standardize(x, model);
  switch (spec.kind) {
    case ModelKind::Logistic: train_logistic(spec, z, y, model); break;
    case ModelKind::LinearSvm: train_svm(spec, z, y, model); break;
    case ModelKind::RandomForest: train_forest(spec, z, y, model); break;
    case ModelKind::GradientBoosting: train_boosting(spec, z, y, model); break;
  }
  return model;
}

std::vector<double> predict_score(const TrainedModel& model, const FeatureMatrix& x) {
  const auto z = standardize(x, model);
  std::vector<double> out(z.rows());
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const auto row = z.row(r);
    switch (model.kind) {
      case ModelKind::Logistic:
        out[r] = sigmoid(linear_score(model, row));
        break;
      case ModelKind::LinearSvm:
        out[r] = linear_score(model, row);
        break;
      case ModelKind::RandomForest: {
        double votes = 0.0;
        for (const auto& t : model.trees) votes += t.predict(row) > 0.5 ? 1.0 : 0.0;
        out[r] = model.trees.empty() ? 0.0 : votes / static_cast<double>(model.trees.size());
        break;
      }
      case ModelKind::GradientBoosting: {
        double f = model.base_score;
        for (const auto& t : model.trees) f += t.predict(row);
        out[r] = sigmoid(f);
        break;
      }
    }
  }
  return out;
}

double default_threshold(ModelKind kind) noexcept {
  return kind == ModelKind::LinearSvm ? 0.0 : 0.5;
}

namespace detail {

double logistic_objective(std::span<const double> params, const FeatureMatrix& z, const LabelVector& y,
                          double l2) {
  const std::size_t d = z.cols();
  double loss = 0.0;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    double m = params[d];
    for (std::size_t i = 0; i < d; ++i) m += params[i] * z(r, i);
    loss += softplus_neg((y[r] == 1 ? 1.0 : -1.0) * m);
  }
  loss /= static_cast<double>(z.rows());
  double reg = 0.0;
  for (std::size_t i = 0; i < d; ++i) reg += params[i] * params[i];
  return loss + 0.5 * l2 * reg;
}

std::vector<double> logistic_gradient(std::span<const double> params, const FeatureMatrix& z,
                                      const LabelVector& y, double l2) {
  const std::size_t d = z.cols();
  const double n = static_cast<double>(z.rows());
  std::vector<double> g(d + 1, 0.0);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    double m = params[d];
    for (std::size_t i = 0; i < d; ++i) m += params[i] * z(r, i);
    const double err = sigmoid(m) - static_cast<double>(y[r]);
    for (std::size_t i = 0; i < d; ++i) g[i] += err * z(r, i) / n;
    g[d] += err / n;
  }
  for (std::size_t i = 0; i < d; ++i) g[i] += l2 * params[i];
  return g;
}

double mean_log_loss(std::span<const double> log_odds, const LabelVector& y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < log_odds.size(); ++i)
    loss += softplus_neg((y[i] == 1 ? 1.0 : -1.0) * log_odds[i]);
  return loss / static_cast<double>(log_odds.size());
}

std::vector<double> boosting_stage_losses(const TrainedModel& model, const FeatureMatrix& x,
                                          const LabelVector& y) {
  if (model.kind != ModelKind::GradientBoosting)
    throw Error(ErrorCode::InvalidParameter, "stage losses need a boosting model");
  const auto z = standardize(x, model);
  std::vector<double> f(z.rows(), model.base_score);
  std::vector<double> out{mean_log_loss(f, y)};
  for (const auto& t : model.trees) {
    for (std::size_t r = 0; r < z.rows(); ++r) f[r] += t.predict(z.row(r));
    out.push_back(mean_log_loss(f, y));
  }
  return out;
}

}  // namespace detail

}  // namespace dsm::mlharness
