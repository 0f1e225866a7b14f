#include <gtest/gtest.h>

#include "artifacts.hpp"
#include "config.hpp"
#include "group_report.hpp"
#include "test_util.hpp"

namespace cli = dsm::cli;
namespace in = dsm::ingest;

TEST(RunConfig, DefaultsAndOverrides) {
  cli::RunConfig cfg;
  EXPECT_EQ(cfg.get("model.kind"), "random_forest");
  EXPECT_EQ(cfg.ds_config().windowing.window_len, 20u);
  EXPECT_EQ(cfg.ds_config().grid, dsm::dsmetric::default_scale_grid());
  cfg.set_assignment("window.len=24");
  cfg.set("scales.max", "21");
  const auto ds = cfg.ds_config();
  EXPECT_EQ(ds.windowing.window_len, 24u);
  EXPECT_EQ(ds.grid.window_sizes.back(), 21u);
  EXPECT_THROW(cfg.set("no.such.key", "1"), cli::UsageError);
  EXPECT_THROW(cfg.set_assignment("window.len"), cli::UsageError);
  cfg.set("window.len", "abc");
  EXPECT_THROW(cfg.ds_config(), cli::UsageError);
}

TEST(RunConfig, LoadTextWithComments) {
  cli::RunConfig cfg;
  cfg.load_text("# comment\nseed = 7\n\nmodel.kind = logistic  # trailing\n", "inline");
  EXPECT_EQ(cfg.global_seed(), 7u);
  EXPECT_EQ(cfg.model_spec().kind, dsm::mlharness::ModelKind::Logistic);
  EXPECT_THROW(cfg.load_text("just words\n", "inline"), cli::UsageError);
}

TEST(RunConfig, StageSeedsDependOnGlobalSeedAndStage) {
  cli::RunConfig a, b;
  b.set("seed", "1");
  EXPECT_NE(a.stage_seed("ae"), a.stage_seed("model"));
  EXPECT_NE(a.stage_seed("ae"), b.stage_seed("ae"));
  EXPECT_EQ(a.ds_config().ae.seed, a.stage_seed("ae"));
}

TEST(RunConfig, ModelOverridesOnlyWhenSet) {
  cli::RunConfig cfg;
  cfg.set("model.kind", "gradient_boosting");
  const auto def = dsm::mlharness::ModelSpec::defaults(dsm::mlharness::ModelKind::GradientBoosting);
  EXPECT_EQ(cfg.model_spec().n_trees, def.n_trees);
  cfg.set("model.n_trees", "17");
  EXPECT_EQ(cfg.model_spec().n_trees, 17u);
  cfg.set("model.kind", "knn");
  EXPECT_THROW(cfg.model_spec(), cli::UsageError);
}

TEST(FeatureCsv, RoundTrip) {
  testutil::TempDir dir;
  const dsm::mlharness::FeatureMatrix x({"a", "b"}, {"s1", "s2", "s3"}, {0.1, 1e-17, 3, 4, 5.5, -6});
  cli::write_feature_csv(dir / "f.csv", x, {in::CohortLabel::HC, in::CohortLabel::AD, in::CohortLabel::HC});
  const auto back = cli::read_feature_csv(dir / "f.csv");
  EXPECT_TRUE(back.labeled);
  EXPECT_EQ(back.y, (dsm::mlharness::LabelVector{0, 1, 0}));
  EXPECT_EQ(back.x.feature_names(), x.feature_names());
  EXPECT_EQ(back.x.row_ids(), x.row_ids());
  EXPECT_EQ(std::vector<double>(back.x.values().begin(), back.x.values().end()),
            std::vector<double>(x.values().begin(), x.values().end()));

  cli::write_feature_csv(dir / "u.csv", x, {std::nullopt, std::nullopt, std::nullopt});
  EXPECT_FALSE(cli::read_feature_csv(dir / "u.csv").labeled);
}

TEST(GroupReport, SummaryStatistics) {
  const auto s = cli::summarize({4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(1.25));
  EXPECT_EQ(s.count, 4u);
}

TEST(GroupReport, ContrastsAndPairs) {
  const in::RoiCatalog cat({{"L", "R"}, {"R", "L"}, {"M", std::nullopt}});
  std::vector<cli::SubjectDs> subjects;
  for (int i = 0; i < 4; ++i) {
    const bool ad = i >= 2;
    subjects.push_back({"s" + std::to_string(i), ad ? in::CohortLabel::AD : in::CohortLabel::HC,
                        {{"L", 1.0 + i}, {"R", 1.0 + i + (ad ? 0.5 : 0.0)}, {"M", ad ? 5.0 : 1.0}}});
  }
  const auto r = cli::build_group_report(subjects, cat, true);
  EXPECT_EQ(r.within_hc.at("M").count, 2u);
  EXPECT_DOUBLE_EQ(r.hc_vs_ad.at("M").difference, 4.0);
  ASSERT_EQ(r.paired_deltas.size(), 4u);
  EXPECT_DOUBLE_EQ(r.paired_deltas[0].delta, 0.0);
  EXPECT_DOUBLE_EQ(r.paired_deltas[3].delta, 0.5);
  const auto j = cli::group_report_to_json(r);
  for (const char* key : {"within_hc", "within_ad", "hc_vs_ad", "paired_rois", "paired_deltas"})
    EXPECT_TRUE(j.contains(key)) << key;

  const in::RoiCatalog unpaired({{"M", std::nullopt}});
  EXPECT_EQ(testutil::code_of([&] { cli::build_group_report(subjects, unpaired, true); }),
            dsm::ErrorCode::MissingPairing);
  EXPECT_TRUE(cli::build_group_report(subjects, unpaired, false).paired_deltas.empty());
}
