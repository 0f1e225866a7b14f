#include <json.hpp>

#include "dsm/error.hpp"
#include "dsm/mlharness.hpp"

namespace dsm::mlharness {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "dsm-model/1";

json tree_to_json(const trees::DecisionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes)
    nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left},
                     {"right", n.right}, {"value", n.value}});
  return nodes;
}

trees::DecisionTree tree_from_json(const json& j) {
  trees::DecisionTree tree;
  for (const auto& n : j) {
    trees::TreeNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.value = n.at("value").get<double>();
    tree.nodes.push_back(node);
  }
  const auto count = static_cast<int>(tree.nodes.size());
  if (count == 0) throw Error(ErrorCode::MalformedModel, "empty tree");
  for (int i = 0; i < count; ++i) {
    const auto& n = tree.nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf()) continue;
    // Children are always stored after their parent, which also rules out cycles.
    if (n.left <= i || n.right <= i || n.left >= count || n.right >= count)
      throw Error(ErrorCode::MalformedModel, "tree node " + std::to_string(i) + " has bad children");
  }
  return tree;
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
  const auto& s = model.spec;
  json j;
  j["format"] = kFormat;
  j["kind"] = std::string(kind_name(model.kind));
  j["spec"] = {{"learning_rate", s.learning_rate}, {"epochs", s.epochs},
               {"l2", s.l2},
               {"n_trees", s.n_trees},
               {"max_depth", s.max_depth},
               {"subsample", s.subsample},
               {"max_features", s.max_features},
               {"seed", s.seed}};
  j["feature_names"] = model.feature_names;
  j["standardization"] = {{"mean", model.feature_mean}, {"scale", model.feature_scale}};
  if (model.kind == ModelKind::Logistic || model.kind == ModelKind::LinearSvm) {
    j["weights"] = model.weights;
    j["intercept"] = model.intercept;
  } else {
    json trees = json::array();
    for (const auto& t : model.trees) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);
    if (model.kind == ModelKind::GradientBoosting) j["base_score"] = model.base_score;
  }
  return j.dump(2);
}

TrainedModel model_from_json(std::string_view text) {
  TrainedModel m;
  try {
    const auto j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormat)
      throw Error(ErrorCode::MalformedModel, "unknown model format");
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::MalformedModel, "unknown model kind");
    m.kind = *kind;
    const auto& s = j.at("spec");
    m.spec.kind = *kind;
    m.spec.learning_rate = s.at("learning_rate").get<double>();
    m.spec.epochs = s.at("epochs").get<std::size_t>();
    m.spec.l2 = s.at("l2").get<double>();
    m.spec.n_trees = s.at("n_trees").get<std::size_t>();
    m.spec.max_depth = s.at("max_depth").get<std::size_t>();
    m.spec.subsample = s.at("subsample").get<double>();
    m.spec.max_features = s.at("max_features").get<std::size_t>();
    m.spec.seed = s.at("seed").get<std::uint64_t>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.feature_mean = j.at("standardization").at("mean").get<std::vector<double>>();
    m.feature_scale = j.at("standardization").at("scale").get<std::vector<double>>();
    if (m.feature_mean.size() != m.feature_names.size() || m.feature_scale.size() != m.feature_names.size())
      throw Error(ErrorCode::MalformedModel, "standardization does not match feature count");
    if (m.kind == ModelKind::Logistic || m.kind == ModelKind::LinearSvm) {
      m.weights = j.at("weights").get<std::vector<double>>();
      m.intercept = j.at("intercept").get<double>();
      if (m.weights.size() != m.feature_names.size())
        throw Error(ErrorCode::MalformedModel, "weight count does not match feature count");
    } else {
      for (const auto& t : j.at("trees")) {
        m.trees.push_back(tree_from_json(t));
        for (const auto& n : m.trees.back().nodes)
          if (n.feature >= static_cast<int>(m.feature_names.size()))
            throw Error(ErrorCode::MalformedModel, "tree splits on an unknown feature");
      }
      if (m.kind == ModelKind::GradientBoosting) m.base_score = j.at("base_score").get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedModel, e.what());
  }
  return m;
}

}  // namespace dsm::mlharness
