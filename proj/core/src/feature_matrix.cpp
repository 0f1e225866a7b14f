#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "dsm/error.hpp"
#include "dsm/mlharness.hpp"

namespace dsm::mlharness {

FeatureMatrix::FeatureMatrix(std::vector<std::string> feature_names, std::vector<std::string> row_ids,
                             std::vector<double> values)
    : feature_names_(std::move(feature_names)),
      row_ids_(std::move(row_ids)),
      values_(std::move(values)) {
  if (feature_names_.empty()) throw Error(ErrorCode::InvalidParameter, "feature matrix needs a column");
  std::unordered_set<std::string> seen;
  for (const auto& n : feature_names_) {
    if (!seen.insert(n).second)
      throw Error(ErrorCode::InvalidParameter, "duplicate feature name '" + n + "'");
  }
  if (values_.size() != row_ids_.size() * feature_names_.size())
    throw Error(ErrorCode::DimensionMismatch, "value count does not match rows x cols");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "feature matrix contains NaN/Inf");
  }
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = (*this)(r, c);
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows_idx) const {
  std::vector<std::string> ids;
  std::vector<double> vals;
  ids.reserve(rows_idx.size());
  vals.reserve(rows_idx.size() * cols());
  for (auto r : rows_idx) {
    if (r >= rows()) throw Error(ErrorCode::DimensionMismatch, "row index out of range");
    ids.push_back(row_ids_[r]);
    const auto src = row(r);
    vals.insert(vals.end(), src.begin(), src.end());
  }
  return FeatureMatrix(feature_names_, std::move(ids), std::move(vals));
}

FeatureMatrix FeatureMatrix::with_column_permuted(std::size_t c, std::span<const std::size_t> order) const {
  if (order.size() != rows() || c >= cols())
    throw Error(ErrorCode::DimensionMismatch, "permutation does not fit the matrix");
  FeatureMatrix out = *this;
  for (std::size_t r = 0; r < rows(); ++r) out.values_[r * cols() + c] = (*this)(order[r], c);
  return out;
}

FeatureMatrix FeatureMatrix::with_column_scaled(std::size_t c, double factor) const {
  if (c >= cols()) throw Error(ErrorCode::DimensionMismatch, "column index out of range");
  FeatureMatrix out = *this;
  for (std::size_t r = 0; r < rows(); ++r) out.values_[r * cols() + c] *= factor;
  return out;
}

FeatureMatrix build_feature_matrix(const std::vector<SubjectDsResults>& results,
                                   const ingest::RoiCatalog& catalog) {
  if (results.empty()) throw Error(ErrorCode::EmptyTable, "no subjects");

  std::set<std::string> roi_set;
  for (const auto& [roi, _] : results.front().by_roi) roi_set.insert(roi);
  for (const auto& s : results) {
    std::set<std::string> mine;
    for (const auto& [roi, _] : s.by_roi) mine.insert(roi);
    if (mine != roi_set)
      throw Error(ErrorCode::InconsistentRoiSets,
                  "subject '" + s.subject_id + "' covers a different ROI set than '" +
                      results.front().subject_id + "'");
  }
  if (roi_set.empty()) throw Error(ErrorCode::InconsistentRoiSets, "subjects carry no ROIs");

  std::vector<std::string> columns;
  for (const auto& e : catalog.entries())
    if (roi_set.contains(e.name)) columns.push_back(e.name);
  for (const auto& roi : roi_set)
    if (!catalog.index_of(roi)) columns.push_back(roi);

  std::vector<std::string> ids;
  std::vector<double> values;
  for (const auto& s : results) {
    ids.push_back(s.subject_id);
    for (const auto& roi : columns) {
      const auto& r = s.by_roi.at(roi);
      if (!r) throw Error(ErrorCode::MissingDs, "subject '" + s.subject_id + "' has no DS for " + roi);
      values.push_back(r->ds);
    }
  }
  return FeatureMatrix(std::move(columns), std::move(ids), std::move(values));
}

FeatureMatrix ablation_features(const std::vector<CvPair>& per_subject) {
  std::vector<std::string> ids;
  std::vector<double> values;
  for (const auto& s : per_subject) {
    if (!s.cv1 || !s.cv2)
      throw Error(ErrorCode::MissingValue, "subject '" + s.subject_id + "' lacks CV1 or CV2");
    ids.push_back(s.subject_id);
    values.push_back(*s.cv1);
    values.push_back(*s.cv2);
  }
  return FeatureMatrix({"cv1", "cv2"}, std::move(ids), std::move(values));
}

}  // namespace dsm::mlharness
