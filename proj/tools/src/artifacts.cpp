#include "artifacts.hpp"

#include <fstream>
#include <sstream>

#include "dsm/csv.hpp"
#include "dsm/error.hpp"
#include "dsm/version.hpp"

namespace dsm::cli {

using nlohmann::json;
namespace fs = std::filesystem;

json ds_result_to_json(const dsmetric::DsResult& r) {
  json kl = json::array();
  for (const auto& [scale, z] : r.kl_series.z) kl.push_back({{"scale", scale}, {"kl", z}});
  json skipped = json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"scale", s.scale}, {"stage", s.stage}, {"reason", s.reason}});
  return {{"cv1", r.cv1},
          {"cv2", r.cv2},
          {"ds", r.ds},
          {"label", std::string(dsmetric::label_name(r.label))},
          {"scales_used", r.scales_used.window_sizes},
          {"kl_per_scale", kl},
          {"peak_count", r.peak_count},
          {"prominence_cov_count", r.prominence_cov.values.size()},
          {"final_train_loss", r.final_train_loss},
          {"skipped_scales", skipped}};
}

json ds_record_to_json(const DsRecord& rec) {
  json j;
  j["subject_id"] = rec.subject_id;
  j["label"] = rec.label ? json(std::string(ingest::label_name(*rec.label))) : json(nullptr);
  j["source"] = rec.source;
  json rois = json::object();
  for (const auto& [name, out] : rec.rois) {
    if (out.result) rois[name] = ds_result_to_json(*out.result);
    else rois[name] = {{"error", {{"code", out.failure->code}, {"message", out.failure->message}}}};
  }
  j["rois"] = std::move(rois);
  if (rec.failure) j["error"] = {{"code", rec.failure->code}, {"message", rec.failure->message}};
  return j;
}

std::vector<DsRecord> read_ds_records(const fs::path& path) {
  std::vector<DsRecord> out;
  try {
    const auto doc = json::parse(read_text(path));
    if (doc.at("format_version").get<std::string>() != kDsFormat)
      throw Error(ErrorCode::MalformedCsv, path.string() + " is not a DS results file");
    for (const auto& r : doc.at("records")) {
      DsRecord rec;
      rec.subject_id = r.at("subject_id").get<std::string>();
      if (!r.at("label").is_null()) rec.label = ingest::parse_label(r.at("label").get<std::string>());
      rec.source = r.value("source", "");
      if (r.contains("error"))
        rec.failure = FailureInfo{r["error"].at("code").get<std::string>(), r["error"].at("message").get<std::string>()};
      for (const auto& [name, v] : r.at("rois").items()) {
        RoiOutcome o;
        if (v.contains("error")) {
          o.failure = FailureInfo{v["error"].at("code").get<std::string>(), v["error"].at("message").get<std::string>()};
        } else {
          dsmetric::DsResult d;
          d.cv1 = v.at("cv1").get<double>();
          d.cv2 = v.at("cv2").get<double>();
          d.ds = v.at("ds").get<double>();
          d.label = v.at("label").get<std::string>() == "stochastic" ? dsmetric::StochasticityLabel::Stochastic
                                                                     : dsmetric::StochasticityLabel::NonStochastic;
          d.scales_used.window_sizes = v.at("scales_used").get<std::vector<std::size_t>>();
          o.result = d;
        }
        rec.rois.emplace(name, std::move(o));
      }
      out.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedCsv, path.string() + ": " + e.what());
  }
  return out;
}

json eval_to_json(const mlharness::EvalReport& r) {
  json roc = json::array();
  for (const auto& p : r.roc_points) roc.push_back({p.fpr, p.tpr});
  return {{"accuracy", r.accuracy},
          {"auc", r.auc},
          {"threshold", r.threshold},
          {"confusion", {{"tp", r.tp}, {"fp", r.fp}, {"tn", r.tn}, {"fn", r.fn}}},
          {"roc_points", roc}};
}

void write_feature_csv(const fs::path& path, const mlharness::FeatureMatrix& x,
                       const std::vector<std::optional<ingest::CohortLabel>>& labels) {
  std::string s;
  csv::Row header{"subject_id", "label"};
  header.insert(header.end(), x.feature_names().begin(), x.feature_names().end());
  s += csv::join_row(header) + "\n";
  for (std::size_t r = 0; r < x.rows(); ++r) {
    csv::Row row{x.row_ids()[r], labels[r] ? std::string(ingest::label_name(*labels[r])) : ""};
    for (std::size_t c = 0; c < x.cols(); ++c) row.push_back(csv::format_double(x(r, c)));
    s += csv::join_row(row) + "\n";
  }
  write_text(path, s);
}

LabeledFeatures read_feature_csv(const fs::path& path) {
  const auto table = csv::read_file(path);
  if (table.rows.empty()) throw Error(ErrorCode::EmptyTable, path.string() + " is empty");
  const auto& header = table.rows[0];
  if (header.size() < 3 || header[0] != "subject_id" || header[1] != "label")
    throw Error(ErrorCode::MalformedCsv, path.string() + ": header must be subject_id,label,<features...>");
  std::vector<std::string> names(header.begin() + 2, header.end());
  std::vector<std::string> ids;
  std::vector<double> values;
  LabeledFeatures out;
  std::size_t labeled = 0;
  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto where = path.string() + " line " + std::to_string(table.line_numbers[r]);
    if (row.size() != header.size()) throw Error(ErrorCode::MalformedCsv, where + ": wrong cell count");
    ids.push_back(row[0]);
    if (row[1].empty()) {
      out.y.push_back(-1);
    } else {
      const auto label = ingest::parse_label(row[1]);
      if (!label) throw Error(ErrorCode::UnknownLabel, where + ": label '" + row[1] + "'");
      out.y.push_back(static_cast<int>(*label));
      ++labeled;
    }
    for (std::size_t c = 2; c < row.size(); ++c) {
      double v = 0.0;
      if (!csv::parse_double(row[c], v)) throw Error(ErrorCode::MalformedCsv, where + ": bad number '" + row[c] + "'");
      values.push_back(v);
    }
  }
  if (ids.empty()) throw Error(ErrorCode::EmptyTable, path.string() + " has no rows");
  out.x = mlharness::FeatureMatrix(std::move(names), std::move(ids), std::move(values));
  out.labeled = labeled == out.y.size();
  return out;
}

void write_roc_csv(const fs::path& path, const mlharness::EvalReport& r) {
  std::string s = "fpr,tpr\n";
  for (const auto& p : r.roc_points) s += csv::format_double(p.fpr) + "," + csv::format_double(p.tpr) + "\n";
  write_text(path, s);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json artifact_header(const char* format, const RunConfig& cfg) {
  return {{"format_version", format}, {"tool_version", kVersion}, {"config", cfg.to_json()}};
}

}  // namespace dsm::cli
