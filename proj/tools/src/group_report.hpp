#pragma once

// Cohort summaries of per-ROI DS values: within HC, within AD, HC against AD
// for each ROI, and per-subject differences between paired ROIs.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsm/ingest.hpp"

namespace dsm::cli {

struct SubjectDs {
  std::string subject_id;
  std::optional<ingest::CohortLabel> label;
  std::map<std::string, std::optional<double>> ds;  ///< nullopt = failed ROI
};

struct RoiStats {
  double mean = 0.0;
  double std = 0.0;  ///< population
  double median = 0.0;
  std::size_t count = 0;
};

struct RoiContrast {
  RoiStats hc;
  RoiStats ad;
  double difference = 0.0;  ///< AD mean minus HC mean
};

struct PairedDelta {
  std::string subject_id;
  std::optional<ingest::CohortLabel> label;
  std::string first;
  std::string second;
  double delta = 0.0;  ///< ds[second] - ds[first]
};

struct GroupReport {
  std::map<std::string, RoiStats> within_hc;
  std::map<std::string, RoiStats> within_ad;
  std::map<std::string, RoiContrast> hc_vs_ad;
  std::vector<PairedDelta> paired_deltas;
  std::vector<std::pair<std::string, std::string>> pairs_used;
};

RoiStats summarize(std::vector<double> values);

/// Throws MissingPairing when include_paired is set and no catalog pair has
/// both members among the reported ROIs.
GroupReport build_group_report(const std::vector<SubjectDs>& subjects, const ingest::RoiCatalog& catalog,
                               bool include_paired);

nlohmann::json group_report_to_json(const GroupReport& report);

}  // namespace dsm::cli
