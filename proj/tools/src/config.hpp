#pragma once

// Flat "section.key = value" run configuration shared by every subcommand.

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dsm/dsmetric.hpp"
#include "dsm/mlharness.hpp"
#include "dsm/project.hpp"

namespace dsm::cli {

/// Bad flags, unknown config keys, unparsable values. Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kConfigEnvVar = "DSM_CONFIG";

class RunConfig {
 public:
  RunConfig();

  /// Throws UsageError for unknown keys. Values are checked when read.
  void set(const std::string& key, const std::string& value);
  /// "key=value".
  void set_assignment(const std::string& assignment);
  /// Lines of "key = value"; '#' starts a comment.
  void load_text(const std::string& text, const std::string& origin);
  void load_file(const std::filesystem::path& path);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;

  std::uint64_t global_seed() const { return get_u64("seed"); }
  std::uint64_t stage_seed(const std::string& stage) const;
  std::size_t threads() const { return get_size("threads"); }

  dsmetric::DsConfig ds_config() const;
  mlharness::ModelSpec model_spec() const;
  project::TsneConfig tsne_config() const;

  /// Every key with its effective value.
  nlohmann::json to_json() const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace dsm::cli
