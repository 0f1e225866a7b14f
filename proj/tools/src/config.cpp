#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dsm/csv.hpp"
#include "dsm/error.hpp"
#include "dsm/random.hpp"

namespace dsm::cli {

namespace {

// Model hyperparameters left empty fall back to the defaults of the chosen kind.
const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"seed", "0"},
      {"threads", "0"},
      {"window.len", "20"},
      {"window.stride", "1"},
      {"window.crop", "0"},
      {"ae.hidden_dim", "16"},
      {"ae.latent_dim", "4"},
      {"ae.learning_rate", "0.01"},
      {"ae.epochs", "500"},
      {"ae.invariance_weight", "0.1"},
      {"scales.min", "5"},
      {"scales.step", "2"},
      {"scales.max", "50"},
      {"ds.threshold", "1.5"},
      {"ds.peak_source", "dissimilarity"},
      {"model.kind", "random_forest"},
      {"model.learning_rate", ""},
      {"model.epochs", ""},
      {"model.l2", ""},
      {"model.n_trees", ""},
      {"model.max_depth", ""},
      {"model.subsample", ""},
      {"model.max_features", ""},
      {"cv.k", "5"},
      {"importance.repeats", "10"},
      {"tsne.perplexity", "15"},
      {"tsne.iterations", "1000"},
  };
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  it->second = value;
}

void RunConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::load_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path.string());
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  double v = 0.0;
  if (!csv::parse_double(get(key), v)) throw UsageError(key + ": expected a number, got '" + get(key) + "'");
  return v;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const auto& s = get(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw UsageError(key + ": expected a non-negative integer, got '" + s + "'");
  return v;
}

std::size_t RunConfig::get_size(const std::string& key) const { return static_cast<std::size_t>(get_u64(key)); }

std::uint64_t RunConfig::stage_seed(const std::string& stage) const { return derive_seed(global_seed(), stage); }

dsmetric::DsConfig RunConfig::ds_config() const {
  dsmetric::DsConfig cfg;
  cfg.windowing.window_len = get_size("window.len");
  cfg.windowing.stride = get_size("window.stride");
  cfg.windowing.crop_len = get_size("window.crop");
  cfg.ae.hidden_dim = get_size("ae.hidden_dim");
  cfg.ae.latent_dim = get_size("ae.latent_dim");
  cfg.ae.learning_rate = get_double("ae.learning_rate");
  cfg.ae.epochs = get_size("ae.epochs");
  cfg.ae.invariance_weight = get_double("ae.invariance_weight");
  cfg.ae.seed = stage_seed("ae");
  try {
    cfg.grid = dsmetric::scale_grid(get_size("scales.min"), get_size("scales.step"), get_size("scales.max"));
  } catch (const Error& e) {
    throw UsageError(std::string("scales: ") + e.what());
  }
  cfg.threshold = get_double("ds.threshold");
  const auto& src = get("ds.peak_source");
  if (src == "dissimilarity") cfg.peak_source = dsmetric::PeakSource::Dissimilarity;
  else if (src == "signal") cfg.peak_source = dsmetric::PeakSource::Signal;
  else throw UsageError("ds.peak_source: expected 'dissimilarity' or 'signal', got '" + src + "'");
  try {
    cfg.windowing.validate();
    cfg.ae.validate(cfg.windowing.effective_crop_len());
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

mlharness::ModelSpec RunConfig::model_spec() const {
  const auto kind = mlharness::parse_model_kind(get("model.kind"));
  if (!kind)
    throw UsageError("model.kind: unknown model '" + get("model.kind") +
                     "' (expected logistic, linear_svm, random_forest or gradient_boosting)");
  auto spec = mlharness::ModelSpec::defaults(*kind);
  if (!get("model.learning_rate").empty()) spec.learning_rate = get_double("model.learning_rate");
  if (!get("model.epochs").empty()) spec.epochs = get_size("model.epochs");
  if (!get("model.l2").empty()) spec.l2 = get_double("model.l2");
  if (!get("model.n_trees").empty()) spec.n_trees = get_size("model.n_trees");
  if (!get("model.max_depth").empty()) spec.max_depth = get_size("model.max_depth");
  if (!get("model.subsample").empty()) spec.subsample = get_double("model.subsample");
  if (!get("model.max_features").empty()) spec.max_features = get_size("model.max_features");
  spec.seed = stage_seed("model");
  try {
    spec.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return spec;
}

project::TsneConfig RunConfig::tsne_config() const {
  project::TsneConfig cfg;
  cfg.perplexity = get_double("tsne.perplexity");
  cfg.iterations = get_size("tsne.iterations");
  cfg.seed = stage_seed("tsne");
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

}  // namespace dsm::cli
