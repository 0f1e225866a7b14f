#pragma once

// Two-dimensional embeddings of feature matrices (PCA and exact t-SNE) and
// labeled scatter export.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dsm/mlharness.hpp"

namespace dsm::project {

struct Embedding2D {
  std::string method;
  std::map<std::string, double> parameters;
  std::vector<std::array<double, 2>> points;
  std::vector<std::string> row_ids;
  std::vector<int> labels;  ///< empty when the input was unlabeled

  friend bool operator==(const Embedding2D&, const Embedding2D&) = default;
};

struct PcaResult {
  Embedding2D embedding;
  std::array<double, 2> component_variance{};
  std::array<std::vector<double>, 2> loadings;
};

/// Centers columns and projects onto the top two covariance eigenvectors.
/// Each component is signed so its largest-magnitude loading is positive.
PcaResult pca_2d(const mlharness::FeatureMatrix& x, const mlharness::LabelVector& labels = {});

struct TsneConfig {
  double perplexity = 15.0;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  std::size_t momentum_switch = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;

  void validate() const;
};

struct TsneResult {
  Embedding2D embedding;
  /// kl_history[t] = KL(P||Q) for the layout entering iteration t; the last
  /// entry is the final layout (size iterations + 1).
  std::vector<double> kl_history;
  std::vector<double> achieved_perplexity;
  std::vector<double> p;  ///< symmetric joint probabilities, n x n row-major
};

/// Exact O(n^2) t-SNE. Requires rows >= 3 * perplexity.
TsneResult tsne_2d(const mlharness::FeatureMatrix& x, const TsneConfig& cfg,
                   const mlharness::LabelVector& labels = {});

namespace detail {

/// Row-conditional Gaussian affinities P(j|i) calibrated to `perplexity`
/// from squared distances (n x n row-major). Returns achieved perplexities.
std::vector<double> calibrate_affinities(const std::vector<double>& sq_dist, std::size_t n,
                                         double perplexity, std::vector<double>& conditional);

}  // namespace detail

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  int label = 0;
  std::string subject_id;
};

std::vector<ScatterPoint> scatter_export(const mlharness::FeatureMatrix& x, const mlharness::LabelVector& y);

/// CSV with header x,y,label,subject_id and 17-significant-digit numbers.
std::string scatter_to_csv(const std::vector<ScatterPoint>& points);
std::string embedding_to_csv(const Embedding2D& embedding);
/// Inverse of the two writers above.
std::vector<ScatterPoint> scatter_from_csv(const std::string& path);

/// Mean silhouette coefficient of 2-D points under Euclidean distance.
double silhouette_score(const std::vector<std::array<double, 2>>& points, const std::vector<int>& labels);

}  // namespace dsm::project
