#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "test_util.hpp"

using nlohmann::json;
using testutil::TempDir;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string err;
};

RunResult run_dsm(const std::string& args, const TempDir& dir, const std::string& env = "") {
  const auto err_path = dir / "stderr.txt";
  const std::string cmd = env + " " + DSM_BINARY + " " + args + " > /dev/null 2> " + err_path.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(err_path);
  std::stringstream ss;
  ss << f.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json load_json(const std::filesystem::path& p) { return json::parse(slurp(p)); }

std::size_t line_count(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::size_t n = 0;
  for (std::string line; std::getline(f, line);)
    if (!line.empty()) ++n;
  return n;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

// Shared small cohort: 8 white-noise HC and 8 sine AD subjects, 3 ROIs each.
class CohortPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("dsm-cli");
    const auto& d = *dir_;
    ASSERT_EQ(run_dsm("--seed 5 synth --cohort --out-dir " + q(d / "coh") + " --n-per-class 8 --rois 3", d).exit_code, 0);
    ASSERT_EQ(run_dsm("--seed 5 --set ae.epochs=200 ds --manifest " + q(d / "coh" / "manifest.csv") + " --out " +
                          q(d / "ds.json"),
                      d)
                  .exit_code,
              0);
    ASSERT_EQ(run_dsm("features --ds " + q(d / "ds.json") + " --out " + q(d / "features.csv"), d).exit_code, 0);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static TempDir* dir_;
};

TempDir* CohortPipeline::dir_ = nullptr;

}  // namespace

TEST(CliSynth, WritesRequestedLength) {
  TempDir d;
  ASSERT_EQ(run_dsm("--seed 3 synth --kind white_noise --length 200 --out " + q(d / "n.csv"), d).exit_code, 0);
  EXPECT_EQ(line_count(d / "n.csv"), 201u);
}

TEST(CliSynth, UnknownKindIsUsageError) {
  TempDir d;
  const auto r = run_dsm("synth --kind brownian --length 50 --out " + q(d / "x.csv"), d);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("brownian"), std::string::npos) << r.err;
}

TEST(CliSynth, SameSeedSameBytes) {
  TempDir d;
  ASSERT_EQ(run_dsm("--seed 9 synth --kind ar1 --phi 0.4 --length 120 --out " + q(d / "a.csv"), d).exit_code, 0);
  ASSERT_EQ(run_dsm("--seed 9 synth --kind ar1 --phi 0.4 --length 120 --out " + q(d / "b.csv"), d).exit_code, 0);
  ASSERT_EQ(run_dsm("--seed 10 synth --kind ar1 --phi 0.4 --length 120 --out " + q(d / "c.csv"), d).exit_code, 0);
  EXPECT_EQ(slurp(d / "a.csv"), slurp(d / "b.csv"));
  EXPECT_NE(slurp(d / "a.csv"), slurp(d / "c.csv"));
}

TEST(CliGlobal, BadFlagsAndKeysAreUsageErrors) {
  TempDir d;
  EXPECT_EQ(run_dsm("--bogus", d).exit_code, 2);
  EXPECT_EQ(run_dsm("--set nosuch.key=1 synth --kind sine --out " + q(d / "s.csv"), d).exit_code, 2);
  EXPECT_EQ(run_dsm("ds --out " + q(d / "o.json"), d).exit_code, 2);
}

TEST(CliDs, NoiseSeriesIsStochastic) {
  TempDir d;
  ASSERT_EQ(run_dsm("--seed 1 synth --kind white_noise --length 200 --column noise --out " + q(d / "n.csv"), d).exit_code, 0);
  ASSERT_EQ(run_dsm("--seed 1 ds --input " + q(d / "n.csv") + " --out " + q(d / "ds.json"), d).exit_code, 0);
  const auto j = load_json(d / "ds.json");
  EXPECT_EQ(j["format_version"], "dsm-ds/1");
  EXPECT_EQ(j["tool_version"], "0.1.0");
  const auto& roi = j["records"][0]["rois"]["noise"];
  EXPECT_EQ(roi["label"], "stochastic");
  EXPECT_LT(roi["ds"].get<double>(), 1.5);
  EXPECT_NEAR(roi["ds"].get<double>(), roi["cv1"].get<double>() * roi["cv2"].get<double>() / 100.0, 1e-9);
}

TEST(CliDs, CorruptSubjectIsRecordedNotFatal) {
  TempDir d;
  ASSERT_EQ(run_dsm("--seed 2 synth --kind sine --random-phase --length 200 --out " + q(d / "good.csv"), d).exit_code, 0);
  std::ofstream(d / "bad.csv") << "a,b\n1,2\n3\n";
  std::ofstream(d / "m.csv") << "subject_id,label,path\ngood,AD,good.csv\nbad,HC,bad.csv\n";
  const auto r = run_dsm("ds --manifest " + q(d / "m.csv") + " --out " + q(d / "ds.json"), d);
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.err.find("MalformedCsv"), std::string::npos) << r.err;
  const auto j = load_json(d / "ds.json");
  EXPECT_EQ(j["summary"]["failed_subjects"], 1);
  ASSERT_EQ(j["records"].size(), 2u);
  EXPECT_EQ(j["records"][0]["subject_id"], "bad");
  EXPECT_EQ(j["records"][0]["error"]["code"], "MalformedCsv");
  EXPECT_TRUE(j["records"][1]["rois"]["signal"].contains("ds"));

  EXPECT_EQ(run_dsm("--fail-fast ds --manifest " + q(d / "m.csv") + " --out " + q(d / "ff.json"), d).exit_code, 1);
}

TEST(CliDs, ConstantSeriesFailsOnlyThatRoi) {
  TempDir d;
  std::ofstream f(d / "s.csv");
  f << "flat,wave\n";
  for (int t = 0; t < 150; ++t) f << "1.0," << std::sin(0.6 * t) << "\n";
  f.close();
  ASSERT_EQ(run_dsm("ds --input " + q(d / "s.csv") + " --out " + q(d / "ds.json"), d).exit_code, 0);
  const auto j = load_json(d / "ds.json");
  EXPECT_EQ(j["records"][0]["rois"]["flat"]["error"]["code"], "ConstantInput");
  EXPECT_TRUE(j["records"][0]["rois"]["wave"].contains("ds"));
}

TEST_F(CohortPipeline, FeaturesHaveOneRowPerSubject) {
  const auto& d = *dir_;
  EXPECT_EQ(line_count(d / "features.csv"), 17u);
  const auto j = load_json(d / "ds.json");
  EXPECT_EQ(j["summary"]["series"], 48);
  EXPECT_EQ(j["summary"]["failed_series"], 0);
  EXPECT_EQ(j["config"]["ae.epochs"], "200");
}

TEST_F(CohortPipeline, TrainEvalImportance) {
  const auto& d = *dir_;
  const auto r = run_dsm("--seed 4 --set cv.k=4 --set model.n_trees=40 train --features " + q(d / "features.csv") +
                             " --model gradient_boosting --out " + q(d / "model.json") + " --report " +
                             q(d / "cv.json") + " --roc " + q(d / "roc.csv"),
                         d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto cv = load_json(d / "cv.json");
  for (const char* key : {"model_kind", "k", "mean_accuracy", "std_accuracy", "mean_auc", "folds",
                          "pooled_out_of_fold", "training_fit", "config", "tool_version"})
    EXPECT_TRUE(cv.contains(key)) << key;
  EXPECT_EQ(cv["k"], 4);
  EXPECT_EQ(cv["folds"].size(), 4u);
  EXPECT_GE(cv["mean_accuracy"].get<double>(), 0.9);
  EXPECT_GT(line_count(d / "roc.csv"), 2u);
  const auto model = load_json(d / "model.json");
  EXPECT_EQ(model["kind"], "gradient_boosting");

  ASSERT_EQ(run_dsm("eval --model " + q(d / "model.json") + " --features " + q(d / "features.csv") + " --out " +
                        q(d / "eval.json"),
                    d)
                .exit_code,
            0);
  const auto ev = load_json(d / "eval.json")["evaluation"];
  for (const char* key : {"accuracy", "auc", "confusion", "roc_points", "threshold"}) EXPECT_TRUE(ev.contains(key)) << key;
  const auto& cm = ev["confusion"];
  EXPECT_EQ(cm["tp"].get<int>() + cm["fp"].get<int>() + cm["tn"].get<int>() + cm["fn"].get<int>(), 16);

  ASSERT_EQ(run_dsm("--seed 4 importance --repeats 3 --model " + q(d / "model.json") + " --features " +
                        q(d / "features.csv") + " --out " + q(d / "imp.json"),
                    d)
                .exit_code,
            0);
  const auto imp = load_json(d / "imp.json");
  EXPECT_EQ(imp["importances"].size(), 3u);
  EXPECT_EQ(imp["sorted"].size(), 3u);
}

TEST_F(CohortPipeline, Projections) {
  const auto& d = *dir_;
  ASSERT_EQ(run_dsm("project --method pca --features " + q(d / "features.csv") + " --out " + q(d / "pca.csv"), d).exit_code, 0);
  EXPECT_EQ(line_count(d / "pca.csv"), 17u);
  ASSERT_EQ(run_dsm("--seed 1 project --method tsne --perplexity 4 --iterations 300 --features " +
                        q(d / "features.csv") + " --out " + q(d / "tsne.csv"),
                    d)
                .exit_code,
            0);
  EXPECT_EQ(line_count(d / "tsne.csv"), 17u);
  EXPECT_EQ(slurp(d / "tsne.csv").substr(0, 21), "x,y,label,subject_id\n");
  // default perplexity 15 needs at least 45 rows
  EXPECT_EQ(run_dsm("project --method tsne --features " + q(d / "features.csv") + " --out " + q(d / "t2.csv"), d).exit_code, 1);
  // scatter needs exactly two columns
  EXPECT_EQ(run_dsm("project --method scatter --features " + q(d / "features.csv") + " --out " + q(d / "s.csv"), d).exit_code, 1);
}

TEST_F(CohortPipeline, GroupReportWithCatalog) {
  const auto& d = *dir_;
  std::ifstream f(d / "coh" / "hc_000.csv");
  std::string header;
  std::getline(f, header);
  const auto c1 = header.find(',');
  const auto c2 = header.find(',', c1 + 1);
  const std::string a = header.substr(0, c1), b = header.substr(c1 + 1, c2 - c1 - 1), c = header.substr(c2 + 1);
  std::ofstream(d / "catalog.csv") << "roi_name,paired_roi_name\n\"" << a << "\",\"" << b << "\"\n\"" << b
                                   << "\",\"" << a << "\"\n\"" << c << "\",\n";
  const auto r = run_dsm("report --ds " + q(d / "ds.json") + " --catalog " + q(d / "catalog.csv") + " --out " +
                             q(d / "report.json"),
                         d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto doc = load_json(d / "report.json");
  EXPECT_EQ(doc["format_version"], "dsm-group-report/1");
  const auto& j = doc["views"];
  EXPECT_EQ(j["within_hc"][a]["count"], 8);
  EXPECT_EQ(j["within_ad"][a]["count"], 8);
  EXPECT_GT(j["hc_vs_ad"][a]["difference"].get<double>(), 0.0);
  EXPECT_EQ(j["paired_deltas"].size(), 16u);

  EXPECT_EQ(run_dsm("report --ds " + q(d / "ds.json") + " --out " + q(d / "r2.json"), d).exit_code, 1);
  EXPECT_EQ(run_dsm("report --no-paired --ds " + q(d / "ds.json") + " --out " + q(d / "r3.json"), d).exit_code, 0);
}

TEST(CliReport, IdenticalPairedSeriesHaveZeroDelta) {
  TempDir d;
  for (const char* s : {"h", "a"}) {
    std::ofstream f(d / (std::string(s) + ".csv"));
    f << "L,R\n";
    for (int t = 0; t < 120; ++t) {
      const double v = std::sin(0.5 * t + (s[0] == 'a' ? 1.0 : 0.0)) + 0.01 * (t % 7);
      f << v << "," << v << "\n";
    }
  }
  std::ofstream(d / "m.csv") << "subject_id,label,path\nh,HC,h.csv\na,AD,a.csv\n";
  std::ofstream(d / "cat.csv") << "roi_name,paired_roi_name\nL,R\nR,L\n";
  ASSERT_EQ(run_dsm("ds --manifest " + q(d / "m.csv") + " --out " + q(d / "ds.json"), d).exit_code, 0);
  ASSERT_EQ(run_dsm("report --ds " + q(d / "ds.json") + " --catalog " + q(d / "cat.csv") + " --out " + q(d / "r.json"), d)
                .exit_code,
            0);
  const auto j = load_json(d / "r.json")["views"];
  ASSERT_EQ(j["paired_deltas"].size(), 2u);
  for (const auto& p : j["paired_deltas"]) EXPECT_EQ(p["delta"].get<double>(), 0.0);
}

TEST(CliConfig, FileEnvAndFlagPrecedence) {
  TempDir d;
  std::ofstream(d / "run.conf") << "# run settings\nwindow.len = 16\nseed = 11\n";
  ASSERT_EQ(run_dsm("--seed 1 synth --kind white_noise --length 150 --out " + q(d / "n.csv"), d).exit_code, 0);

  ASSERT_EQ(run_dsm("--config " + q(d / "run.conf") + " --set window.len=18 ds --input " + q(d / "n.csv") + " --out " +
                        q(d / "a.json"),
                    d)
                .exit_code,
            0);
  const auto a = load_json(d / "a.json");
  EXPECT_EQ(a["config"]["window.len"], "18");
  EXPECT_EQ(a["config"]["seed"], "11");

  ASSERT_EQ(run_dsm("--seed 12 ds --input " + q(d / "n.csv") + " --out " + q(d / "b.json"), d,
                    "DSM_CONFIG=" + q(d / "run.conf"))
                .exit_code,
            0);
  const auto b = load_json(d / "b.json");
  EXPECT_EQ(b["config"]["window.len"], "16");
  EXPECT_EQ(b["config"]["seed"], "12");

  std::ofstream(d / "bad.conf") << "window.lenn = 16\n";
  EXPECT_EQ(run_dsm("--config " + q(d / "bad.conf") + " ds --input " + q(d / "n.csv") + " --out " + q(d / "c.json"), d)
                .exit_code,
            2);
  EXPECT_EQ(run_dsm("--config " + q(d / "missing.conf") + " synth --kind sine --out " + q(d / "s.csv"), d).exit_code,
            2);
}
