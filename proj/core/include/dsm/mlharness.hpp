#pragma once

// Subject classification from per-ROI DS features: feature assembly, four
// classifiers, ROC/AUC evaluation, stratified k-fold cross-validation and
// permutation importance.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/dsmetric.hpp"
#include "dsm/ingest.hpp"
#include "dsm/trees.hpp"

namespace dsm::mlharness {

/// Subjects x named features, row-major.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> feature_names, std::vector<std::string> row_ids,
                std::vector<double> values);

  std::size_t rows() const noexcept { return row_ids_.size(); }
  std::size_t cols() const noexcept { return feature_names_.size(); }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols(), cols()}; }
  std::vector<double> column(std::size_t c) const;
  std::span<const double> values() const noexcept { return values_; }

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  /// Copy with column c reordered by `order` (order[i] = source row for row i).
  FeatureMatrix with_column_permuted(std::size_t c, std::span<const std::size_t> order) const;
  /// Copy with column c multiplied by factor.
  FeatureMatrix with_column_scaled(std::size_t c, double factor) const;

  trees::DataView view() const noexcept { return {values_.data(), rows(), cols()}; }

 private:
  std::vector<std::string> feature_names_;
  std::vector<std::string> row_ids_;
  std::vector<double> values_;
};

/// HC = 0, AD = 1.
using LabelVector = std::vector<int>;

/// One subject's DS outcome per ROI; nullopt marks a failed ROI.
struct SubjectDsResults {
  std::string subject_id;
  std::map<std::string, std::optional<dsmetric::DsResult>> by_roi;
};

/// One row per subject, one column per ROI (catalog order first, then any
/// remaining ROIs by name), cell = ds.
FeatureMatrix build_feature_matrix(const std::vector<SubjectDsResults>& results,
                                   const ingest::RoiCatalog& catalog);

struct CvPair {
  std::string subject_id;
  std::optional<double> cv1;
  std::optional<double> cv2;
};

/// Two columns named "cv1" and "cv2".
FeatureMatrix ablation_features(const std::vector<CvPair>& per_subject);

enum class ModelKind { Logistic, LinearSvm, RandomForest, GradientBoosting };

std::string_view kind_name(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;

struct ModelSpec {
  ModelKind kind = ModelKind::Logistic;
  double learning_rate = 0.1;   ///< GD step (linear) or shrinkage (boosting)
  std::size_t epochs = 2000;    ///< linear models
  double l2 = 1e-3;             ///< linear models
  std::size_t n_trees = 200;    ///< ensembles
  std::size_t max_depth = 6;    ///< ensembles
  double subsample = 0.8;       ///< boosting row fraction per stage
  std::size_t max_features = 0; ///< forest features per split; 0 = floor(sqrt(d))
  std::uint64_t seed = 0;

  /// Conventional defaults for each kind.
  static ModelSpec defaults(ModelKind kind);
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct TrainedModel {
  ModelKind kind = ModelKind::Logistic;
  ModelSpec spec;
  std::vector<std::string> feature_names;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
  // logistic / linear_svm
  std::vector<double> weights;
  double intercept = 0.0;
  // random_forest / gradient_boosting
  std::vector<trees::DecisionTree> trees;
  double base_score = 0.0;  ///< boosting initial log-odds

  std::size_t input_dim() const noexcept { return feature_mean.size(); }
  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

TrainedModel train(const ModelSpec& spec, const FeatureMatrix& x, const LabelVector& y);

/// Logistic/boosting: P(AD). SVM: signed margin. Forest: fraction of trees voting AD.
std::vector<double> predict_score(const TrainedModel& model, const FeatureMatrix& x);

/// 0.5 for probability-like scores, 0 for margins.
double default_threshold(ModelKind kind) noexcept;

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct EvalReport {
  double accuracy = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::vector<RocPoint> roc_points;
  double auc = 0.0;
  double threshold = 0.5;
};

/// Accuracy and confusion at `threshold` (score >= threshold predicts AD),
/// ROC over every distinct score, trapezoidal AUC.
EvalReport evaluate_scores(std::span<const double> scores, const LabelVector& y, double threshold);
EvalReport evaluate(const TrainedModel& model, const FeatureMatrix& x, const LabelVector& y,
                    std::optional<double> threshold = std::nullopt);

/// Mann-Whitney form: P(score_AD > score_HC) + 0.5 P(tie).
double auc_rank_statistic(std::span<const double> scores, const LabelVector& y);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

std::vector<Fold> stratified_kfold(const LabelVector& y, std::size_t k, std::uint64_t seed);

struct CvReport {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<EvalReport> folds;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  ///< population std across folds
  double mean_auc = 0.0;
  std::vector<double> out_of_fold_scores;
  EvalReport pooled;  ///< evaluation of the out-of-fold scores together
};

CvReport cross_validate(const ModelSpec& spec, const FeatureMatrix& x, const LabelVector& y,
                        std::size_t k = 5, std::uint64_t seed = 0);

struct ImportanceReport {
  std::string method = "permutation_accuracy_drop";
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  double baseline_accuracy = 0.0;
  std::vector<std::string> feature_names;
  std::vector<double> importances;  ///< mean accuracy drop per feature
};

ImportanceReport permutation_importance(const TrainedModel& model, const FeatureMatrix& x,
                                        const LabelVector& y, std::size_t repeats,
                                        std::uint64_t seed);

/// JSON document {"format": ..., "kind": ..., ...}; reload with model_from_json.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);

namespace detail {

/// Mean log-loss + (l2/2)||w||^2 over already-standardized features.
/// params = [w_0 .. w_{d-1}, intercept].
double logistic_objective(std::span<const double> params, const FeatureMatrix& z,
                          const LabelVector& y, double l2);
std::vector<double> logistic_gradient(std::span<const double> params, const FeatureMatrix& z,
                                      const LabelVector& y, double l2);
/// Mean logistic loss of raw log-odds against labels.
double mean_log_loss(std::span<const double> log_odds, const LabelVector& y);
/// Training log-loss after each boosting stage (index 0 = base score only).
std::vector<double> boosting_stage_losses(const TrainedModel& model, const FeatureMatrix& x,
                                          const LabelVector& y);

}  // namespace detail

}  // namespace dsm::mlharness
