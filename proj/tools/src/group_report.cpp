#include "group_report.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dsm/error.hpp"

namespace dsm::cli {

using nlohmann::json;

RoiStats summarize(std::vector<double> values) {
  RoiStats s;
  s.count = values.size();
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / n);
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 == 1 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
  return s;
}

GroupReport build_group_report(const std::vector<SubjectDs>& subjects, const ingest::RoiCatalog& catalog,
                               bool include_paired) {
  std::set<std::string> rois;
  for (const auto& s : subjects)
    for (const auto& [roi, _] : s.ds) rois.insert(roi);

  GroupReport rep;
  for (const auto& roi : rois) {
    std::vector<double> hc, ad;
    for (const auto& s : subjects) {
      const auto it = s.ds.find(roi);
      if (!s.label || it == s.ds.end() || !it->second) continue;
      (*s.label == ingest::CohortLabel::HC ? hc : ad).push_back(*it->second);
    }
    rep.within_hc[roi] = summarize(hc);
    rep.within_ad[roi] = summarize(ad);
    RoiContrast c{rep.within_hc[roi], rep.within_ad[roi], 0.0};
    c.difference = c.ad.mean - c.hc.mean;
    rep.hc_vs_ad[roi] = c;
  }

  if (!include_paired) return rep;
  for (const auto& [a, b] : catalog.pairs())
    if (rois.contains(a) && rois.contains(b)) rep.pairs_used.emplace_back(a, b);
  if (rep.pairs_used.empty())
    throw Error(ErrorCode::MissingPairing, "paired view requested but no catalog pair is present in the results");
  for (const auto& s : subjects) {
    for (const auto& [a, b] : rep.pairs_used) {
      const auto ia = s.ds.find(a), ib = s.ds.find(b);
      if (ia == s.ds.end() || ib == s.ds.end() || !ia->second || !ib->second) continue;
      rep.paired_deltas.push_back({s.subject_id, s.label, a, b, *ib->second - *ia->second});
    }
  }
  return rep;
}

namespace {

json stats_json(const RoiStats& s) {
  if (s.count == 0) return {{"mean", nullptr}, {"std", nullptr}, {"median", nullptr}, {"count", 0}};
  return {{"mean", s.mean}, {"std", s.std}, {"median", s.median}, {"count", s.count}};
}

}  // namespace

json group_report_to_json(const GroupReport& rep) {
  json hc = json::object(), ad = json::object(), contrast = json::object();
  for (const auto& [roi, s] : rep.within_hc) hc[roi] = stats_json(s);
  for (const auto& [roi, s] : rep.within_ad) ad[roi] = stats_json(s);
  for (const auto& [roi, c] : rep.hc_vs_ad) {
    contrast[roi] = {{"hc", stats_json(c.hc)},
                     {"ad", stats_json(c.ad)},
                     {"difference", c.hc.count && c.ad.count ? json(c.difference) : json(nullptr)}};
  }
  json paired = json::array();
  for (const auto& d : rep.paired_deltas)
    paired.push_back({{"subject_id", d.subject_id},
                      {"label", d.label ? json(std::string(ingest::label_name(*d.label))) : json(nullptr)},
                      {"first", d.first},
                      {"second", d.second},
                      {"delta", d.delta}});
  json pairs = json::array();
  for (const auto& [a, b] : rep.pairs_used) pairs.push_back({a, b});
  return {{"within_hc", hc}, {"within_ad", ad}, {"hc_vs_ad", contrast}, {"paired_rois", pairs},
          {"paired_deltas", paired}};
}

}  // namespace dsm::cli
