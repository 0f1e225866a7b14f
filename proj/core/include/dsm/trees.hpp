#pragma once

// Depth-limited binary decision trees used by the forest and boosting
// classifiers. Split search is exhaustive over midpoints of distinct sorted
// values; ties go to the lower feature index, then the lower threshold.

#include <cstddef>
#include <span>
#include <vector>

#include "dsm/random.hpp"

namespace dsm::trees {

struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   ///< taken when x[feature] <= threshold
  int right = -1;
  double value = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root

  std::size_t leaf_index(std::span<const double> x) const;
  double predict(std::span<const double> x) const { return nodes[leaf_index(x)].value; }
  std::size_t depth() const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

/// Row-major matrix view.
struct DataView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data + r * cols, cols}; }
};

struct TreeParams {
  std::size_t max_depth = 6;
  std::size_t max_features = 0;  ///< features examined per split; 0 means all
  std::size_t min_samples_split = 2;
};

/// Classification tree on 0/1 labels with Gini impurity. `samples` may
/// contain repeats (bootstrap). Leaf value = fraction of label 1.
DecisionTree grow_gini_tree(const DataView& x, std::span<const int> labels,
                            std::span<const std::size_t> samples, const TreeParams& params, Rng& rng);

/// Regression tree on real targets minimizing squared error. Leaf value =
/// mean target.
DecisionTree grow_regression_tree(const DataView& x, std::span<const double> targets,
                                  std::span<const std::size_t> samples, const TreeParams& params,
                                  Rng& rng);

}  // namespace dsm::trees
