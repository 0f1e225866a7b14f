#include "dsm/ingest.hpp"

#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "dsm/csv.hpp"
#include "dsm/error.hpp"

namespace dsm::ingest {

namespace fs = std::filesystem;

void RoiTimeSeriesTable::validate() const {
  if (roi_names.empty() || series.empty()) throw Error(ErrorCode::EmptyTable, "table has no ROIs");
  if (roi_names.size() != series.size())
    throw Error(ErrorCode::MalformedCsv, "ROI name and series counts differ");
  std::unordered_set<std::string> seen;
  for (const auto& name : roi_names) {
    if (!seen.insert(name).second)
      throw Error(ErrorCode::MalformedCsv, "duplicate ROI name '" + name + "'");
  }
  for (const auto& s : series) {
    if (s.size() != series.front().size())
      throw Error(ErrorCode::MalformedCsv, "ROI series differ in length");
  }
}

RoiTimeSeriesTable parse_roi_csv(const fs::path& path, std::optional<std::string> subject_id) {
  const auto table = csv::read_file(path);
  if (table.rows.empty()) throw Error(ErrorCode::EmptyTable, path.string() + " is empty");

  const auto& header = table.rows.front();
  std::unordered_set<std::string> seen;
  for (const auto& name : header) {
    if (name.empty()) throw Error(ErrorCode::MalformedCsv, "empty ROI name in header");
    if (!seen.insert(name).second)
      throw Error(ErrorCode::MalformedCsv, "duplicate header '" + name + "'");
  }
  if (table.rows.size() < 2) throw Error(ErrorCode::EmptyTable, path.string() + " has no data rows");

  std::vector<std::vector<double>> columns(header.size());
  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = std::to_string(table.line_numbers[r]);
    if (row.size() != header.size())
      throw Error(ErrorCode::MalformedCsv, "row " + line + " has " + std::to_string(row.size()) +
                                               " cells, expected " + std::to_string(header.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
      double v = 0.0;
      if (!csv::parse_double(row[c], v))
        throw Error(ErrorCode::MalformedCsv,
                    "row " + line + " column '" + header[c] + "': non-numeric cell '" + row[c] + "'");
      columns[c].push_back(v);
    }
  }

  RoiTimeSeriesTable out;
  out.subject_id = subject_id ? *subject_id : path.stem().string();
  out.roi_names = header;
  for (auto& col : columns) out.series.emplace_back(std::move(col));
  return out;
}

void write_roi_csv(const RoiTimeSeriesTable& table, const fs::path& path) {
  table.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << csv::join_row(table.roi_names) << '\n';
  for (std::size_t t = 0; t < table.length(); ++t) {
    for (std::size_t c = 0; c < table.series.size(); ++c) {
      if (c) out << ',';
      out << csv::format_double(table.series[c][t]);
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string_view label_name(CohortLabel label) noexcept {
  return label == CohortLabel::HC ? "HC" : "AD";
}

std::optional<CohortLabel> parse_label(std::string_view text) noexcept {
  if (text == "HC") return CohortLabel::HC;
  if (text == "AD") return CohortLabel::AD;
  return std::nullopt;
}

CohortManifest parse_manifest(const fs::path& path) {
  const auto table = csv::read_file(path);
  if (table.rows.empty()) throw Error(ErrorCode::EmptyTable, path.string() + " is empty");
  const auto& header = table.rows.front();
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"subject_id", "label", "path"}) {
    if (!col.contains(required))
      throw Error(ErrorCode::MalformedCsv, "manifest lacks column '" + std::string(required) + "'");
  }

  const fs::path base = path.parent_path();
  CohortManifest manifest;
  std::unordered_set<std::string> ids;
  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = std::to_string(table.line_numbers[r]);
    if (row.size() != header.size())
      throw Error(ErrorCode::MalformedCsv, "manifest row " + line + " is ragged");
    ManifestEntry e;
    e.subject_id = row[col["subject_id"]];
    if (e.subject_id.empty()) throw Error(ErrorCode::MalformedCsv, "empty subject_id on row " + line);
    const auto label = parse_label(row[col["label"]]);
    if (!label)
      throw Error(ErrorCode::UnknownLabel, "label '" + row[col["label"]] + "' on row " + line +
                                               " is not HC or AD");
    e.label = *label;
    if (!ids.insert(e.subject_id).second)
      throw Error(ErrorCode::DuplicateSubject, "subject '" + e.subject_id + "' listed twice");
    fs::path p = row[col["path"]];
    if (p.is_relative()) p = base / p;
    if (!fs::exists(p))
      throw Error(ErrorCode::MissingFile, "subject '" + e.subject_id + "': " + p.string());
    e.path = p;
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

void write_manifest(const CohortManifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "subject_id,label,path\n";
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  for (const auto& e : manifest.entries) {
    fs::path p = e.path;
    std::error_code ec;
    auto rel = fs::relative(fs::absolute(p), fs::absolute(base), ec);
    if (!ec && !rel.empty()) p = rel;
    else p = fs::absolute(p);
    out << csv::join_row({e.subject_id, std::string(label_name(e.label)), p.generic_string()})
        << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

RoiCatalog::RoiCatalog(std::vector<RoiCatalogEntry> entries) : entries_(std::move(entries)) {
  std::unordered_map<std::string, std::optional<std::string>> by_name;
  for (const auto& e : entries_) {
    if (!by_name.emplace(e.name, e.pair).second)
      throw Error(ErrorCode::InvalidParameter, "ROI '" + e.name + "' listed twice in catalog");
  }
  for (const auto& e : entries_) {
    if (!e.pair) continue;
    if (*e.pair == e.name) throw Error(ErrorCode::InvalidParameter, "ROI '" + e.name + "' paired with itself");
    const auto it = by_name.find(*e.pair);
    if (it == by_name.end() || it->second != e.name)
      throw Error(ErrorCode::InvalidParameter,
                  "pairing " + e.name + " <-> " + *e.pair + " is not symmetric");
  }
}

std::optional<std::size_t> RoiCatalog::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::string> RoiCatalog::pair_of(std::string_view name) const {
  const auto i = index_of(name);
  return i ? entries_[*i].pair : std::nullopt;
}

std::vector<std::pair<std::string, std::string>> RoiCatalog::pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> done;
  for (const auto& e : entries_) {
    if (!e.pair || done.contains(e.name)) continue;
    out.emplace_back(e.name, *e.pair);
    done.insert(e.name);
    done.insert(*e.pair);
  }
  return out;
}

RoiCatalog default_roi_catalog() {
  std::vector<RoiCatalogEntry> entries = {
      {"Intraparietal Sulcus (IPS) 134", std::nullopt},
      {"Anterior Prefrontal Cortex (aPFC) 5", std::nullopt},
      {"Fusiform Gyrus 84", std::nullopt},
      {"Inferior Temporal Cortex 91", std::nullopt},
      {"Inferior Temporal Cortex 72", std::nullopt},
      {"Medial Prefrontal Cortex (mPFC) 4", std::nullopt},
      {"Occipital Cortex 136", std::nullopt},
      {"Post Cingulate Cortex 115", std::nullopt},
      {"Post Cingulate Cortex 111", std::nullopt},
      {"Post Cingulate Cortex 108", std::nullopt},
      {"Post Cingulate Cortex 93", std::nullopt},
      {"Post Cingulate Cortex 90", std::nullopt},
      {"Post Cingulate Cortex 73", std::nullopt},
      {"Precuneus Cortex 112", std::nullopt},
      {"Precuneus Cortex 94", std::nullopt},
      {"Precuneus Cortex 85", std::nullopt},
      {"Ventromedial Prefrontal Cortex (vmPFC) 1", "Ventromedial Prefrontal Cortex (vmPFC) 7"},
      {"Ventromedial Prefrontal Cortex (vmPFC) 7", "Ventromedial Prefrontal Cortex (vmPFC) 1"},
  };
  return RoiCatalog(std::move(entries));
}

RoiCatalog parse_roi_catalog(const fs::path& path) {
  const auto table = csv::read_file(path);
  if (table.rows.empty()) throw Error(ErrorCode::EmptyTable, path.string() + " is empty");
  const auto& header = table.rows.front();
  if (header.empty() || header[0] != "roi_name")
    throw Error(ErrorCode::MalformedCsv, "catalog header must start with roi_name");
  std::vector<RoiCatalogEntry> entries;
  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.empty() || row[0].empty() || row.size() > 2)
      throw Error(ErrorCode::MalformedCsv,
                  "catalog row " + std::to_string(table.line_numbers[r]) + " is malformed");
    RoiCatalogEntry e{row[0], std::nullopt};
    if (row.size() == 2 && !row[1].empty()) e.pair = row[1];
    entries.push_back(std::move(e));
  }
  return RoiCatalog(std::move(entries));
}

std::size_t RoiMask::count() const {
  std::size_t n = 0;
  for (auto v : inside) n += v ? 1 : 0;
  return n;
}

RoiMask mask_from_volume(const NiftiVolume4D& volume, std::string name) {
  RoiMask mask;
  mask.name = std::move(name);
  mask.nx = volume.nx;
  mask.ny = volume.ny;
  mask.nz = volume.nz;
  mask.inside.resize(volume.voxels());
  for (std::size_t i = 0; i < volume.voxels(); ++i) mask.inside[i] = volume.data[i] != 0.0 ? 1 : 0;
  if (mask.count() == 0) throw Error(ErrorCode::EmptyMask, "mask '" + mask.name + "' selects no voxel");
  return mask;
}

RoiTimeSeriesTable extract_roi_means(const NiftiVolume4D& volume, const std::vector<RoiMask>& masks,
                                     std::string subject_id) {
  RoiTimeSeriesTable table;
  table.subject_id = std::move(subject_id);
  const std::size_t nvox = volume.voxels();
  for (const auto& mask : masks) {
    if (mask.nx != volume.nx || mask.ny != volume.ny || mask.nz != volume.nz ||
        mask.inside.size() != nvox)
      throw Error(ErrorCode::DimMismatch, "mask '" + mask.name + "' does not match volume dims");
    std::vector<std::size_t> voxels;
    for (std::size_t i = 0; i < nvox; ++i)
      if (mask.inside[i]) voxels.push_back(i);
    if (voxels.empty()) throw Error(ErrorCode::EmptyMask, "mask '" + mask.name + "' selects no voxel");

    std::vector<double> series(volume.nt);
    for (std::size_t t = 0; t < volume.nt; ++t) {
      double sum = 0.0;
      for (auto v : voxels) sum += volume.data[t * nvox + v];
      series[t] = sum / static_cast<double>(voxels.size());
    }
    table.roi_names.push_back(mask.name);
    table.series.emplace_back(std::move(series));
  }
  return table;
}

}  // namespace dsm::ingest
