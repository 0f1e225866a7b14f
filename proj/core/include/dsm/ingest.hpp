#pragma once

// Real-world inputs: ROI-by-time CSV tables, cohort manifests, ROI catalogs
// and uncompressed NIfTI-1 volumes with binary ROI masks.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/numkernel.hpp"

namespace dsm::ingest {

struct RoiTimeSeriesTable {
  std::string subject_id;
  std::vector<std::string> roi_names;
  std::vector<numkernel::RealSeries> series;  ///< parallel to roi_names, equal lengths

  std::size_t roi_count() const noexcept { return roi_names.size(); }
  std::size_t length() const noexcept { return series.empty() ? 0 : series.front().size(); }
  /// Checks uniqueness of names and equal series lengths.
  void validate() const;
};

/// Header row of ROI names, one row per time point. subject_id defaults to
/// the file stem.
RoiTimeSeriesTable parse_roi_csv(const std::filesystem::path& path,
                                 std::optional<std::string> subject_id = std::nullopt);
void write_roi_csv(const RoiTimeSeriesTable& table, const std::filesystem::path& path);

enum class CohortLabel { HC = 0, AD = 1 };

std::string_view label_name(CohortLabel label) noexcept;
/// Exactly "HC" or "AD".
std::optional<CohortLabel> parse_label(std::string_view text) noexcept;

struct ManifestEntry {
  std::string subject_id;
  CohortLabel label = CohortLabel::HC;
  std::filesystem::path path;  ///< resolved against the manifest's directory
};

struct CohortManifest {
  std::vector<ManifestEntry> entries;
};

/// CSV with header subject_id,label,path.
CohortManifest parse_manifest(const std::filesystem::path& path);
/// Entry paths are taken relative to the working directory and written
/// relative to the manifest directory when possible.
void write_manifest(const CohortManifest& manifest, const std::filesystem::path& path);

struct RoiCatalogEntry {
  std::string name;
  std::optional<std::string> pair;
};

/// Ordered ROI list with symmetric hemispheric pairings.
class RoiCatalog {
 public:
  RoiCatalog() = default;
  explicit RoiCatalog(std::vector<RoiCatalogEntry> entries);

  const std::vector<RoiCatalogEntry>& entries() const noexcept { return entries_; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::optional<std::string> pair_of(std::string_view name) const;
  /// Each unordered pair once, in catalog order of the first member.
  std::vector<std::pair<std::string, std::string>> pairs() const;

 private:
  std::vector<RoiCatalogEntry> entries_;
};

/// DMN ROIs named in the reference analysis; users extend it via a catalog file.
RoiCatalog default_roi_catalog();
/// CSV with header roi_name,paired_roi_name (second cell may be empty).
RoiCatalog parse_roi_catalog(const std::filesystem::path& path);

// ---- NIfTI-1 ----

enum class NiftiDatatype : std::int16_t { Int16 = 4, Float32 = 16 };

struct NiftiVolume4D {
  std::size_t nx = 0, ny = 0, nz = 0, nt = 0;
  std::vector<double> data;  ///< x fastest, then y, z, t; scaling already applied
  NiftiDatatype datatype = NiftiDatatype::Float32;
  float scl_slope = 1.0f;
  float scl_inter = 0.0f;
  float vox_offset = 352.0f;

  std::size_t voxels() const noexcept { return nx * ny * nz; }
  double at(std::size_t x, std::size_t y, std::size_t z, std::size_t t) const {
    return data[((t * nz + z) * ny + y) * nx + x];
  }
};

NiftiVolume4D read_nifti(const std::filesystem::path& path);

/// Writes a single-file NIfTI-1. For Int16 the stored integers are
/// round((value - scl_inter) / scl_slope).
void write_nifti(const NiftiVolume4D& volume, const std::filesystem::path& path);

struct RoiMask {
  std::string name;
  std::size_t nx = 0, ny = 0, nz = 0;
  std::vector<std::uint8_t> inside;  ///< x fastest

  std::size_t count() const;
};

/// Nonzero voxels of the first volume become the mask.
RoiMask mask_from_volume(const NiftiVolume4D& volume, std::string name);

RoiTimeSeriesTable extract_roi_means(const NiftiVolume4D& volume, const std::vector<RoiMask>& masks,
                                     std::string subject_id = {});

}  // namespace dsm::ingest
