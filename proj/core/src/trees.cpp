#include "dsm/trees.hpp"

#include <algorithm>
#include <numeric>

#include "dsm/error.hpp"

namespace dsm::trees {

namespace {

constexpr double kMinGain = 1e-12;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Impurity bookkeeping for one side of a candidate split.
struct GiniStats {
  double n = 0.0, pos = 0.0;
  void add(double y) { n += 1.0; pos += y; }
  void remove(double y) { n -= 1.0; pos -= y; }
  double impurity_sum() const {  // n * gini
    if (n <= 0.0) return 0.0;
    const double p = pos / n;
    return n * 2.0 * p * (1.0 - p);
  }
};

struct SseStats {
  double n = 0.0, sum = 0.0;
  void add(double y) { n += 1.0; sum += y; }
  void remove(double y) { n -= 1.0; sum -= y; }
  // Negative of (sum of squares explained); lower is better, like impurity.
  double impurity_sum() const { return n > 0.0 ? -(sum * sum) / n : 0.0; }
};

std::vector<std::size_t> candidate_features(std::size_t cols, std::size_t max_features, Rng& rng) {
  std::vector<std::size_t> all(cols);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (max_features == 0 || max_features >= cols) return all;
  // Partial Fisher-Yates, then ascending order for the tie-break rule.
  for (std::size_t i = 0; i < max_features; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(cols - i));
    std::swap(all[i], all[j]);
  }
  all.resize(max_features);
  std::sort(all.begin(), all.end());
  return all;
}

template <typename Stats, typename Target>
class Grower {
 public:
  Grower(const DataView& x, Target target, const TreeParams& params, Rng& rng)
      : x_(x), target_(target), params_(params), rng_(rng) {}

  DecisionTree grow(std::span<const std::size_t> samples) {
    DecisionTree tree;
    std::vector<std::size_t> idx(samples.begin(), samples.end());
    build(tree, idx, 0);
    return tree;
  }

 private:
  double leaf_value(const std::vector<std::size_t>& idx) const {
    double s = 0.0;
    for (auto i : idx) s += target_(i);
    return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
  }

  Split best_split(const std::vector<std::size_t>& idx) {
    Stats parent;
    for (auto i : idx) parent.add(target_(i));
    const double parent_impurity = parent.impurity_sum();

    Split best;
    std::vector<std::size_t> order = idx;
    for (const auto f : candidate_features(x_.cols, params_.max_features, rng_)) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return x_.at(a, f) < x_.at(b, f); });
      Stats left, right = parent;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const double y = target_(order[k]);
        left.add(y);
        right.remove(y);
        const double here = x_.at(order[k], f);
        const double next = x_.at(order[k + 1], f);
        if (!(here < next)) continue;
        const double gain =
            (parent_impurity - left.impurity_sum() - right.impurity_sum()) / parent.n;
        if (gain > best.gain + kMinGain) {
          best.feature = static_cast<int>(f);
          best.threshold = here + (next - here) / 2.0;
          best.gain = gain;
        }
      }
    }
    return best;
  }

  int build(DecisionTree& tree, std::vector<std::size_t>& idx, std::size_t depth) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    tree.nodes[node_id].value = leaf_value(idx);

    if (depth >= params_.max_depth || idx.size() < params_.min_samples_split) return node_id;
    const Split split = best_split(idx);
    if (split.feature < 0 || split.gain <= kMinGain) return node_id;

    std::vector<std::size_t> left, right;
    for (auto i : idx)
      (x_.at(i, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(i);
    if (left.empty() || right.empty()) return node_id;
    idx.clear();
    idx.shrink_to_fit();

    tree.nodes[node_id].feature = split.feature;
    tree.nodes[node_id].threshold = split.threshold;
    const int l = build(tree, left, depth + 1);
    const int r = build(tree, right, depth + 1);
    tree.nodes[node_id].left = l;
    tree.nodes[node_id].right = r;
    return node_id;
  }

  const DataView& x_;
  Target target_;
  const TreeParams& params_;
  Rng& rng_;
};

void check_samples(const DataView& x, std::span<const std::size_t> samples, std::size_t targets) {
  if (samples.empty()) throw Error(ErrorCode::InsufficientData, "tree needs at least one sample");
  if (targets != x.rows) throw Error(ErrorCode::DimensionMismatch, "targets vs rows");
  for (auto s : samples)
    if (s >= x.rows) throw Error(ErrorCode::DimensionMismatch, "sample index out of range");
}

}  // namespace

std::size_t DecisionTree::leaf_index(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return i;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    for (int c : {nodes[i].left, nodes[i].right}) {
      d[static_cast<std::size_t>(c)] = d[i] + 1;
      deepest = std::max(deepest, d[i] + 1);
    }
  }
  return deepest;
}

DecisionTree grow_gini_tree(const DataView& x, std::span<const int> labels,
                            std::span<const std::size_t> samples, const TreeParams& params, Rng& rng) {
  check_samples(x, samples, labels.size());
  auto target = [labels](std::size_t i) { return labels[i] == 1 ? 1.0 : 0.0; };
  return Grower<GiniStats, decltype(target)>(x, target, params, rng).grow(samples);
}

DecisionTree grow_regression_tree(const DataView& x, std::span<const double> targets,
                                  std::span<const std::size_t> samples, const TreeParams& params,
                                  Rng& rng) {
  check_samples(x, samples, targets.size());
  auto target = [targets](std::size_t i) { return targets[i]; };
  return Grower<SseStats, decltype(target)>(x, target, params, rng).grow(samples);
}

}  // namespace dsm::trees
