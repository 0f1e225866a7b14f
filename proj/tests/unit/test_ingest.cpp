#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <fstream>

#include "dsm/ingest.hpp"
#include "dsm/random.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace in = dsm::ingest;
namespace nk = dsm::numkernel;
using dsm::ErrorCode;
using testutil::code_of;
using testutil::TempDir;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

in::NiftiVolume4D random_volume(std::size_t nx, std::size_t ny, std::size_t nz, std::size_t nt,
                                std::uint64_t seed) {
  in::NiftiVolume4D v;
  v.nx = nx;
  v.ny = ny;
  v.nz = nz;
  v.nt = nt;
  dsm::Rng rng(seed);
  v.data.resize(nx * ny * nz * nt);
  // float-representable values so a float32 round trip is exact
  for (auto& d : v.data) d = static_cast<float>(rng.normal());
  return v;
}

in::RoiMask empty_mask(std::size_t nx, std::size_t ny, std::size_t nz, std::string name) {
  return {std::move(name), nx, ny, nz, std::vector<std::uint8_t>(nx * ny * nz, 0)};
}

}  // namespace

TEST(RoiCsv, ParsesShape) {
  TempDir dir;
  write_file(dir / "s01.csv", "a,b,c\n1,2,3\n4,5,6\n7,8,9\n10,11,12\n");
  const auto t = in::parse_roi_csv(dir / "s01.csv");
  EXPECT_EQ(t.subject_id, "s01");
  EXPECT_EQ(t.roi_names, (std::vector<std::string>{"a", "b", "c"}));
  ASSERT_EQ(t.roi_count(), 3u);
  EXPECT_EQ(t.length(), 4u);
  EXPECT_EQ(t.series[1].vec(), (std::vector<double>{2, 5, 8, 11}));
}

TEST(RoiCsv, RaggedRowNamesTheLine) {
  TempDir dir;
  write_file(dir / "bad.csv", "a,b\n1,2\n3\n");
  try {
    in::parse_roi_csv(dir / "bad.csv");
    FAIL() << "expected MalformedCsv";
  } catch (const dsm::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedCsv);
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos) << e.what();
  }
}

TEST(RoiCsv, RejectsNanAndMissingFile) {
  TempDir dir;
  write_file(dir / "nan.csv", "a\n1\nnan\n");
  EXPECT_THROW(in::parse_roi_csv(dir / "nan.csv"), dsm::Error);
  EXPECT_EQ(code_of([&] { in::parse_roi_csv(dir / "nope.csv"); }), ErrorCode::MissingFile);
}

TEST(RoiCsv, RoundTrip) {
  TempDir dir;
  dsm::Rng rng(1);
  in::RoiTimeSeriesTable t;
  t.subject_id = "sub";
  for (int r = 0; r < 5; ++r) {
    std::vector<double> v(30);
    for (auto& x : v) x = rng.normal() * 1e3;
    t.roi_names.push_back("ROI, " + std::to_string(r));
    t.series.emplace_back(v);
  }
  in::write_roi_csv(t, dir / "sub.csv");
  const auto back = in::parse_roi_csv(dir / "sub.csv");
  ASSERT_EQ(back.roi_names, t.roi_names);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t i = 0; i < 30; ++i) EXPECT_NEAR(back.series[r][i], t.series[r][i], 1e-12);
}

TEST(Manifest, ParsesAndResolvesPaths) {
  TempDir dir;
  std::string text = "subject_id,label,path\n";
  for (int i = 0; i < 100; ++i)
    text += "s" + std::to_string(i) + "," + (i < 50 ? "HC" : "AD") + ",data/s" + std::to_string(i) + ".csv\n";
  write_file(dir / "m.csv", text);
  std::filesystem::create_directories(dir / "data");
  for (int i = 0; i < 100; ++i) write_file(dir / "data" / ("s" + std::to_string(i) + ".csv"), "a\n1\n");
  const auto m = in::parse_manifest(dir / "m.csv");
  ASSERT_EQ(m.entries.size(), 100u);
  EXPECT_EQ(std::count_if(m.entries.begin(), m.entries.end(),
                          [](const auto& e) { return e.label == in::CohortLabel::AD; }),
            50);
  EXPECT_EQ(m.entries[0].path, dir.path() / "data" / "s0.csv");
}

TEST(Manifest, Errors) {
  TempDir dir;
  write_file(dir / "a.csv", "x\n1\n");
  write_file(dir / "b.csv", "x\n1\n");
  write_file(dir / "mci.csv", "subject_id,label,path\na,MCI,a.csv\n");
  EXPECT_EQ(code_of([&] { in::parse_manifest(dir / "mci.csv"); }), ErrorCode::UnknownLabel);
  write_file(dir / "dup.csv", "subject_id,label,path\na,HC,a.csv\na,AD,b.csv\n");
  EXPECT_EQ(code_of([&] { in::parse_manifest(dir / "dup.csv"); }), ErrorCode::DuplicateSubject);
}

TEST(Manifest, WriteThenParse) {
  TempDir dir;
  std::filesystem::create_directories(dir / "x");
  write_file(dir / "x" / "a.csv", "r\n1\n");
  write_file(dir / "x" / "b.csv", "r\n1\n");
  in::CohortManifest m;
  m.entries.push_back({"a", in::CohortLabel::HC, dir / "x" / "a.csv"});
  m.entries.push_back({"b", in::CohortLabel::AD, dir / "x" / "b.csv"});
  in::write_manifest(m, dir / "x" / "manifest.csv");
  const auto back = in::parse_manifest(dir / "x" / "manifest.csv");
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(std::filesystem::weakly_canonical(back.entries[1].path),
            std::filesystem::weakly_canonical(dir / "x" / "b.csv"));
  EXPECT_EQ(back.entries[1].label, in::CohortLabel::AD);
}

TEST(RoiCatalog, DefaultHasSymmetricPair) {
  const auto c = in::default_roi_catalog();
  EXPECT_GE(c.entries().size(), 17u);
  ASSERT_FALSE(c.pairs().empty());
  for (const auto& [a, b] : c.pairs()) {
    EXPECT_EQ(c.pair_of(a), b);
    EXPECT_EQ(c.pair_of(b), a);
  }
}

TEST(RoiCatalog, ParseFileAndRejectAsymmetry) {
  TempDir dir;
  write_file(dir / "cat.csv", "roi_name,paired_roi_name\nL,R\nR,L\nMid,\n");
  const auto c = in::parse_roi_catalog(dir / "cat.csv");
  EXPECT_EQ(c.entries().size(), 3u);
  EXPECT_EQ(c.pair_of("L"), "R");
  EXPECT_FALSE(c.pair_of("Mid").has_value());
  EXPECT_EQ(c.index_of("Mid"), 2u);
  write_file(dir / "bad.csv", "roi_name,paired_roi_name\nL,R\nR,\n");
  EXPECT_THROW(in::parse_roi_catalog(dir / "bad.csv"), dsm::Error);
}

TEST(Nifti, Float32RoundTrip) {
  TempDir dir;
  auto v = random_volume(2, 2, 2, 3, 5);
  in::write_nifti(v, dir / "v.nii");
  const auto back = in::read_nifti(dir / "v.nii");
  EXPECT_EQ(back.nx, 2u);
  EXPECT_EQ(back.nt, 3u);
  EXPECT_EQ(back.datatype, in::NiftiDatatype::Float32);
  EXPECT_EQ(back.data, v.data);
}

TEST(Nifti, Int16ScalingApplied) {
  TempDir dir;
  in::NiftiVolume4D v;
  v.nx = v.ny = v.nz = v.nt = 1;
  v.datatype = in::NiftiDatatype::Int16;
  v.scl_slope = 2.0f;
  v.scl_inter = 1.0f;
  v.data = {7.0};
  in::write_nifti(v, dir / "i.nii");
  // the stored integer is (7 - 1) / 2 = 3
  std::ifstream f(dir / "i.nii", std::ios::binary);
  f.seekg(352);
  std::int16_t raw = 0;
  f.read(reinterpret_cast<char*>(&raw), 2);
  EXPECT_EQ(raw, 3);
  EXPECT_EQ(in::read_nifti(dir / "i.nii").data, std::vector<double>{7.0});
}

TEST(Nifti, Int16RoundTrip) {
  TempDir dir;
  auto v = random_volume(3, 2, 2, 4, 6);
  v.datatype = in::NiftiDatatype::Int16;
  for (auto& d : v.data) d = std::round(d * 100.0);
  in::write_nifti(v, dir / "i.nii");
  EXPECT_EQ(in::read_nifti(dir / "i.nii").data, v.data);
}

TEST(Nifti, Errors) {
  TempDir dir;
  auto v = random_volume(2, 2, 2, 2, 1);
  in::write_nifti(v, dir / "v.nii");
  std::string bytes;
  {
    std::ifstream f(dir / "v.nii", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(f), {});
  }
  std::string bad = bytes;
  std::memcpy(bad.data() + 344, "ni1\0", 4);
  write_file(dir / "magic.nii", bad);
  EXPECT_EQ(code_of([&] { in::read_nifti(dir / "magic.nii"); }), ErrorCode::BadMagic);

  write_file(dir / "short.nii", bytes.substr(0, bytes.size() - 5));
  EXPECT_EQ(code_of([&] { in::read_nifti(dir / "short.nii"); }), ErrorCode::TruncatedData);

  std::string dtype = bytes;
  const std::int16_t f64 = 64;
  std::memcpy(dtype.data() + 70, &f64, 2);
  write_file(dir / "f64.nii", dtype);
  EXPECT_EQ(code_of([&] { in::read_nifti(dir / "f64.nii"); }), ErrorCode::UnsupportedDatatype);

  EXPECT_EQ(code_of([&] { in::read_nifti(dir / "missing.nii"); }), ErrorCode::MissingFile);
}

TEST(RoiMeans, SingleVoxelAndPair) {
  auto v = random_volume(2, 2, 2, 3, 7);
  auto single = empty_mask(2, 2, 2, "one");
  single.inside[5] = 1;
  auto t = in::extract_roi_means(v, {single});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(t.series[0][i], v.data[i * 8 + 5]);

  v.data[0] = 1.0;
  v.data[1] = 3.0;
  auto two = empty_mask(2, 2, 2, "two");
  two.inside[0] = two.inside[1] = 1;
  t = in::extract_roi_means(v, {two});
  EXPECT_DOUBLE_EQ(t.series[0][0], 2.0);
}

TEST(RoiMeans, MatchesTripleLoop) {
  const auto v = random_volume(4, 4, 4, 10, 8);
  dsm::Rng rng(9);
  std::vector<in::RoiMask> masks;
  for (int m = 0; m < 4; ++m) {
    auto mask = empty_mask(4, 4, 4, "m" + std::to_string(m));
    for (auto& b : mask.inside) b = rng.uniform() < 0.3;
    mask.inside[static_cast<std::size_t>(m)] = 1;
    masks.push_back(mask);
  }
  const auto t = in::extract_roi_means(v, masks);
  const auto want = oracle::mask_means(v, masks);
  for (std::size_t m = 0; m < masks.size(); ++m)
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(t.series[m][i], want[m][i], 1e-12);
}

TEST(RoiMeans, VoxelOrderDoesNotMatter) {
  // Permuting which voxels are visited first must not change the mean: relabel
  // voxels by a random permutation in both the volume and the mask.
  const auto v = random_volume(3, 3, 3, 6, 10);
  dsm::Rng rng(11);
  auto mask = empty_mask(3, 3, 3, "m");
  for (auto& b : mask.inside) b = rng.uniform() < 0.5;
  mask.inside[0] = 1;

  std::vector<std::size_t> perm(27);
  for (std::size_t i = 0; i < 27; ++i) perm[i] = i;
  rng.shuffle(perm);
  auto pv = v;
  auto pm = mask;
  for (std::size_t i = 0; i < 27; ++i) {
    pm.inside[perm[i]] = mask.inside[i];
    for (std::size_t t = 0; t < 6; ++t) pv.data[t * 27 + perm[i]] = v.data[t * 27 + i];
  }
  const auto a = in::extract_roi_means(v, {mask});
  const auto b = in::extract_roi_means(pv, {pm});
  for (std::size_t t = 0; t < 6; ++t) EXPECT_NEAR(a.series[0][t], b.series[0][t], 1e-12);
}

TEST(RoiMeans, Errors) {
  const auto v = random_volume(2, 2, 2, 3, 1);
  EXPECT_EQ(code_of([&] { in::extract_roi_means(v, {empty_mask(2, 2, 2, "e")}); }), ErrorCode::EmptyMask);
  auto wrong = empty_mask(3, 2, 2, "w");
  wrong.inside[0] = 1;
  EXPECT_EQ(code_of([&] { in::extract_roi_means(v, {wrong}); }), ErrorCode::DimMismatch);
}

TEST(RoiMeans, MaskFromVolume) {
  auto v = random_volume(2, 2, 1, 2, 1);
  v.data = {0, 1, 0, 2, 5, 5, 5, 5};
  const auto m = in::mask_from_volume(v, "roi");
  EXPECT_EQ(m.count(), 2u);
  EXPECT_EQ(m.inside, (std::vector<std::uint8_t>{0, 1, 0, 1}));
}
