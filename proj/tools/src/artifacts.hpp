#pragma once

// On-disk formats produced and consumed by the subcommands.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "dsm/dsmetric.hpp"
#include "dsm/ingest.hpp"
#include "dsm/mlharness.hpp"

namespace dsm::cli {

inline constexpr const char* kDsFormat = "dsm-ds/1";
inline constexpr const char* kEvalFormat = "dsm-eval/1";
inline constexpr const char* kImportanceFormat = "dsm-importance/1";
inline constexpr const char* kGroupReportFormat = "dsm-group-report/1";

struct FailureInfo {
  std::string code;
  std::string message;
};

/// One series' outcome inside a DS record.
struct RoiOutcome {
  std::optional<dsmetric::DsResult> result;
  std::optional<FailureInfo> failure;
};

/// One subject in a DS batch.
struct DsRecord {
  std::string subject_id;
  std::optional<ingest::CohortLabel> label;
  std::string source;
  std::map<std::string, RoiOutcome> rois;
  std::optional<FailureInfo> failure;  ///< the whole input could not be read
};

nlohmann::json ds_result_to_json(const dsmetric::DsResult& r);
nlohmann::json ds_record_to_json(const DsRecord& rec);
/// Reads the fields downstream commands need (cv1, cv2, ds, label).
std::vector<DsRecord> read_ds_records(const std::filesystem::path& path);

nlohmann::json eval_to_json(const mlharness::EvalReport& r);

/// Header subject_id,label,<features...>; label is HC, AD or empty.
struct LabeledFeatures {
  mlharness::FeatureMatrix x;
  mlharness::LabelVector y;
  bool labeled = false;
};

void write_feature_csv(const std::filesystem::path& path, const mlharness::FeatureMatrix& x,
                       const std::vector<std::optional<ingest::CohortLabel>>& labels);
LabeledFeatures read_feature_csv(const std::filesystem::path& path);

void write_roc_csv(const std::filesystem::path& path, const mlharness::EvalReport& r);

/// Writes text to path, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
/// Pretty JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// {"format_version", "tool_version", "config"} header shared by JSON outputs.
nlohmann::json artifact_header(const char* format, const RunConfig& cfg);

}  // namespace dsm::cli
