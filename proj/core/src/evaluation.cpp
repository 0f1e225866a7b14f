#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsm/error.hpp"
#include "dsm/mlharness.hpp"
#include "dsm/random.hpp"

namespace dsm::mlharness {

namespace {

void check_scores(std::span<const double> scores, const LabelVector& y) {
  if (scores.empty()) throw Error(ErrorCode::EmptyEvaluation, "nothing to evaluate");
  if (scores.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "scores vs labels");
  for (double s : scores)
    if (!std::isfinite(s)) throw Error(ErrorCode::NonFiniteInput, "non-finite score");
}

double accuracy_of(std::span<const double> scores, const LabelVector& y, double threshold) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) hit += ((scores[i] >= threshold) == (y[i] == 1)) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(scores.size());
}

}  // namespace

EvalReport evaluate_scores(std::span<const double> scores, const LabelVector& y, double threshold) {
  check_scores(scores, y);
  EvalReport rep;
  rep.threshold = threshold;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (y[i] == 1) (predicted ? rep.tp : rep.fn)++;
    else (predicted ? rep.fp : rep.tn)++;
  }
  rep.accuracy = static_cast<double>(rep.tp + rep.tn) / static_cast<double>(scores.size());

  const double pos = static_cast<double>(rep.tp + rep.fn);
  const double neg = static_cast<double>(rep.fp + rep.tn);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  rep.roc_points.push_back({0.0, 0.0});
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (y[order[j]] == 1 ? tp : fp) += 1.0;
      ++j;
    }
    rep.roc_points.push_back({neg > 0 ? fp / neg : 0.0, pos > 0 ? tp / pos : 0.0});
    i = j;
  }
  if (pos == 0.0 || neg == 0.0) {
    rep.auc = 0.5;
    return rep;
  }
  double area = 0.0;
  for (std::size_t i = 1; i < rep.roc_points.size(); ++i) {
    const auto& a = rep.roc_points[i - 1];
    const auto& b = rep.roc_points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  rep.auc = area;
  return rep;
}

EvalReport evaluate(const TrainedModel& model, const FeatureMatrix& x, const LabelVector& y,
                    std::optional<double> threshold) {
  if (x.rows() == 0) throw Error(ErrorCode::EmptyEvaluation, "nothing to evaluate");
  const auto scores = predict_score(model, x);
  return evaluate_scores(scores, y, threshold.value_or(default_threshold(model.kind)));
}

double auc_rank_statistic(std::span<const double> scores, const LabelVector& y) {
  check_scores(scores, y);
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (y[j] == 1) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return pairs > 0.0 ? wins / pairs : 0.5;
}

std::vector<Fold> stratified_kfold(const LabelVector& y, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidParameter, "k must be at least 2");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) throw Error(ErrorCode::InvalidParameter, "labels must be 0 or 1");
    by_class[y[i]].push_back(i);
  }
  for (const auto& members : by_class)
    if (members.size() < k)
      throw Error(ErrorCode::TooFewPerClass, "each class needs at least k=" + std::to_string(k) + " members");

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> test(k);
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i) test[i % k].push_back(members[i]);
  }
  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(test[f].begin(), test[f].end());
    folds[f].test = test[f];
    for (std::size_t g = 0; g < k; ++g)
      if (g != f) folds[f].train.insert(folds[f].train.end(), test[g].begin(), test[g].end());
    std::sort(folds[f].train.begin(), folds[f].train.end());
  }
  return folds;
}

CvReport cross_validate(const ModelSpec& spec, const FeatureMatrix& x, const LabelVector& y, std::size_t k,
                        std::uint64_t seed) {
  if (y.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "labels vs rows");
  CvReport rep;
  rep.k = k;
  rep.seed = seed;
  rep.out_of_fold_scores.assign(x.rows(), 0.0);
  const auto folds = stratified_kfold(y, k, seed);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    LabelVector y_train, y_test;
    for (auto i : fold.train) y_train.push_back(y[i]);
    for (auto i : fold.test) y_test.push_back(y[i]);
    ModelSpec fold_spec = spec;
    fold_spec.seed = mix_seed(spec.seed + f);
    const auto model = train(fold_spec, x.select_rows(fold.train), y_train);
    const auto scores = predict_score(model, x.select_rows(fold.test));
    for (std::size_t i = 0; i < fold.test.size(); ++i) rep.out_of_fold_scores[fold.test[i]] = scores[i];
    rep.folds.push_back(evaluate_scores(scores, y_test, default_threshold(spec.kind)));
    rep.fold_accuracy.push_back(rep.folds.back().accuracy);
  }
  const double kk = static_cast<double>(folds.size());
  for (const auto& f : rep.folds) {
    rep.mean_accuracy += f.accuracy / kk;
    rep.mean_auc += f.auc / kk;
  }
  double ss = 0.0;
  for (double a : rep.fold_accuracy) ss += (a - rep.mean_accuracy) * (a - rep.mean_accuracy);
  rep.std_accuracy = std::sqrt(ss / kk);
  rep.pooled = evaluate_scores(rep.out_of_fold_scores, y, default_threshold(spec.kind));
  return rep;
}

ImportanceReport permutation_importance(const TrainedModel& model, const FeatureMatrix& x,
                                        const LabelVector& y, std::size_t repeats, std::uint64_t seed) {
  if (repeats == 0) throw Error(ErrorCode::InvalidParameter, "repeats must be positive");
  const double threshold = default_threshold(model.kind);
  ImportanceReport rep;
  rep.repeats = repeats;
  rep.seed = seed;
  rep.feature_names = x.feature_names();
  rep.baseline_accuracy = evaluate(model, x, y, threshold).accuracy;

  Rng rng(seed);
  std::vector<std::size_t> order(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double drop = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      rng.shuffle(order);
      const auto scores = predict_score(model, x.with_column_permuted(c, order));
      drop += rep.baseline_accuracy - accuracy_of(scores, y, threshold);
    }
    rep.importances.push_back(drop / static_cast<double>(repeats));
  }
  return rep;
}

}  // namespace dsm::mlharness
