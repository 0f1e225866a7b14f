#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <set>

#include "artifacts.hpp"
#include "config.hpp"
#include "dsm/csv.hpp"
#include "dsm/error.hpp"
#include "dsm/parallel.hpp"
#include "dsm/project.hpp"
#include "dsm/synthsig.hpp"
#include "dsm/version.hpp"
#include "group_report.hpp"

namespace dsm::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct GlobalOptions {
  std::string config_path;
  std::vector<std::string> assignments;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool fail_fast = false;
};

struct SynthOptions {
  std::string kind = "white_noise";
  std::size_t length = 200;
  std::string out;
  std::string column = "signal";
  double phi = 0.5, frequency = 0.1, amplitude = 1.0, phase = 0.0, r = 4.0, x0 = 0.2, snr_db = 0.0;
  bool random_phase = false;
  bool cohort = false;
  std::string out_dir;
  std::size_t n_per_class = 50;
  std::size_t rois = 34;
  std::string kind_a = "white_noise";
  std::string kind_b = "sine";
};

struct DsOptions {
  std::vector<std::string> inputs;
  std::string manifest;
  std::string nifti;
  std::vector<std::string> masks;
  std::string subject;
  std::string out;
};

struct FeaturesOptions {
  std::string ds;
  std::string catalog;
  std::string out;
  std::string ablation_roi;
};

struct TrainOptions {
  std::string features;
  std::string model_kind;
  std::string out;
  std::string report;
  std::string roc;
};

struct EvalOptions {
  std::string model;
  std::string features;
  std::string out;
  std::string roc;
  std::optional<double> threshold;
};

struct ImportanceOptions {
  std::string model;
  std::string features;
  std::string out;
  std::optional<std::size_t> repeats;
};

struct ProjectOptions {
  std::string features;
  std::string method = "tsne";
  std::string out;
  std::optional<double> perplexity;
  std::optional<std::size_t> iterations;
};

struct ReportOptions {
  std::string ds;
  std::string catalog;
  std::string out;
  bool no_paired = false;
};

FailureInfo failure_of(const std::exception& e) {
  if (const auto* de = dynamic_cast<const Error*>(&e)) {
    const std::string code(error_code_name(de->code()));
    std::string msg = de->what();
    if (msg.rfind(code + ": ", 0) == 0) msg.erase(0, code.size() + 2);
    return {code, msg};
  }
  return {"InternalError", e.what()};
}

ingest::RoiCatalog load_catalog(const std::string& path) {
  return path.empty() ? ingest::default_roi_catalog() : ingest::parse_roi_catalog(path);
}

// ---- synth ----

synthsig::SignalKind parse_signal_kind(const std::string& flag, const std::string& name) {
  const auto kind = synthsig::parse_kind(name);
  if (!kind)
    throw UsageError(flag + ": unknown signal kind '" + name +
                     "' (expected white_noise, ar1, flicker, sine, logistic_map or mix)");
  return *kind;
}

synthsig::GeneratorSpec base_spec(const SynthOptions& o) {
  synthsig::GeneratorSpec s;
  s.length = o.length;
  s.phi = o.phi;
  s.frequency = o.frequency;
  s.amplitude = o.amplitude;
  s.phase = o.phase;
  s.random_phase = o.random_phase;
  s.r = o.r;
  s.x0 = o.x0;
  s.snr_db = o.snr_db;
  return s;
}

void validate_spec(const synthsig::GeneratorSpec& s) {
  try {
    s.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("synth: ") + e.what());
  }
}

std::vector<std::string> cohort_roi_names(std::size_t count) {
  std::vector<std::string> names;
  const auto catalog = ingest::default_roi_catalog();
  for (const auto& e : catalog.entries()) {
    if (names.size() == count) break;
    names.push_back(e.name);
  }
  for (std::size_t i = names.size(); i < count; ++i) names.push_back("ROI " + std::to_string(i + 1));
  return names;
}

int cmd_synth(const SynthOptions& o, const RunConfig& cfg) {
  if (!o.cohort) {
    if (o.out.empty()) throw UsageError("synth: --out is required");
    auto spec = base_spec(o);
    spec.kind = parse_signal_kind("--kind", o.kind);
    spec.seed = cfg.global_seed();
    validate_spec(spec);
    const auto x = synthsig::generate(spec);
    ingest::RoiTimeSeriesTable table{fs::path(o.out).stem().string(), {o.column}, {x}};
    if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
    ingest::write_roi_csv(table, o.out);
    return kExitOk;
  }

  if (o.out_dir.empty()) throw UsageError("synth --cohort: --out-dir is required");
  if (o.n_per_class == 0 || o.rois == 0) throw UsageError("synth --cohort: --n-per-class and --rois must be positive");
  auto spec_a = base_spec(o), spec_b = base_spec(o);
  spec_a.kind = parse_signal_kind("--kind-a", o.kind_a);
  spec_b.kind = parse_signal_kind("--kind-b", o.kind_b);
  // Cohort members differ in phase as well as noise.
  spec_a.random_phase = spec_b.random_phase = true;
  validate_spec(spec_a);
  validate_spec(spec_b);

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  const auto roi_names = cohort_roi_names(o.rois);
  ingest::CohortManifest manifest;
  for (int label = 0; label < 2; ++label) {
    for (std::size_t i = 0; i < o.n_per_class; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "%s_%03zu", label == 0 ? "hc" : "ad", i);
      ingest::RoiTimeSeriesTable table;
      table.subject_id = id;
      table.roi_names = roi_names;
      for (std::size_t r = 0; r < roi_names.size(); ++r) {
        auto spec = label == 0 ? spec_a : spec_b;
        spec.seed = cfg.stage_seed("synth/" + table.subject_id + "/" + std::to_string(r));
        table.series.push_back(synthsig::generate(spec));
      }
      const auto path = dir / (table.subject_id + ".csv");
      ingest::write_roi_csv(table, path);
      manifest.entries.push_back({table.subject_id, static_cast<ingest::CohortLabel>(label), path});
    }
  }
  ingest::write_manifest(manifest, dir / "manifest.csv");
  return kExitOk;
}

// ---- ds ----

struct SubjectJob {
  DsRecord record;
  std::optional<ingest::RoiTimeSeriesTable> table;
};

int cmd_ds(const DsOptions& o, const RunConfig& cfg, bool fail_fast) {
  if (o.out.empty()) throw UsageError("ds: --out is required");
  if (o.inputs.empty() && o.manifest.empty() && o.nifti.empty())
    throw UsageError("ds: give --input, --manifest or --nifti");
  if (!o.nifti.empty() && o.masks.empty()) throw UsageError("ds: --nifti needs at least one --mask");
  const auto ds_cfg = cfg.ds_config();

  std::vector<SubjectJob> jobs;
  auto load = [&](SubjectJob job, auto&& loader) {
    try {
      job.table = loader();
      job.table->validate();
    } catch (const std::exception& e) {
      job.record.failure = failure_of(e);
      job.table.reset();
    }
    jobs.push_back(std::move(job));
  };
  if (!o.manifest.empty()) {
    const auto manifest = ingest::parse_manifest(o.manifest);
    for (const auto& e : manifest.entries) {
      SubjectJob job;
      job.record.subject_id = e.subject_id;
      job.record.label = e.label;
      job.record.source = e.path.string();
      load(std::move(job), [&] { return ingest::parse_roi_csv(e.path, e.subject_id); });
    }
  }
  for (const auto& in : o.inputs) {
    SubjectJob job;
    job.record.subject_id = fs::path(in).stem().string();
    job.record.source = in;
    load(std::move(job), [&] { return ingest::parse_roi_csv(in); });
  }
  if (!o.nifti.empty()) {
    SubjectJob job;
    job.record.subject_id = o.subject.empty() ? fs::path(o.nifti).stem().string() : o.subject;
    job.record.source = o.nifti;
    load(std::move(job), [&] {
      const auto volume = ingest::read_nifti(o.nifti);
      std::vector<ingest::RoiMask> masks;
      for (const auto& m : o.masks) {
        auto name = fs::path(m).filename().string();
        for (const char* ext : {".nii"})
          if (name.size() > 4 && name.ends_with(ext)) name.erase(name.size() - 4);
        masks.push_back(ingest::mask_from_volume(ingest::read_nifti(m), name));
      }
      return ingest::extract_roi_means(volume, masks, o.subject.empty() ? fs::path(o.nifti).stem().string() : o.subject);
    });
  }

  std::set<std::string> ids;
  for (const auto& j : jobs)
    if (!ids.insert(j.record.subject_id).second)
      throw Error(ErrorCode::DuplicateSubject, "subject '" + j.record.subject_id + "' appears twice");

  struct SeriesTask {
    std::size_t job;
    std::size_t roi;
  };
  std::vector<SeriesTask> tasks;
  for (std::size_t j = 0; j < jobs.size(); ++j)
    if (jobs[j].table)
      for (std::size_t r = 0; r < jobs[j].table->roi_count(); ++r) tasks.push_back({j, r});

  std::vector<RoiOutcome> outcomes(tasks.size());
  parallel_for(tasks.size(), cfg.threads(), [&](std::size_t t) {
    const auto& table = *jobs[tasks[t].job].table;
    try {
      outcomes[t].result = dsmetric::compute_ds(table.series[tasks[t].roi], ds_cfg);
    } catch (const std::exception& e) {
      outcomes[t].failure = failure_of(e);
    }
  });
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& job = jobs[tasks[t].job];
    job.record.rois.emplace(job.table->roi_names[tasks[t].roi], std::move(outcomes[t]));
  }

  std::sort(jobs.begin(), jobs.end(),
            [](const SubjectJob& a, const SubjectJob& b) { return a.record.subject_id < b.record.subject_id; });
  std::size_t failed_series = 0, failed_subjects = 0;
  json records = json::array();
  for (const auto& j : jobs) {
    if (j.record.failure) {
      ++failed_subjects;
      std::cerr << "dsm ds: " << j.record.subject_id << ": " << j.record.failure->code << ": "
                << j.record.failure->message << "\n";
    }
    for (const auto& [roi, out] : j.record.rois)
      if (out.failure) {
        ++failed_series;
        std::cerr << "dsm ds: " << j.record.subject_id << " / " << roi << ": " << out.failure->code << ": "
                  << out.failure->message << "\n";
      }
    records.push_back(ds_record_to_json(j.record));
  }
  if (fail_fast && (failed_series + failed_subjects) > 0) {
    std::cerr << "dsm ds: stopping because --fail-fast is set\n";
    return kExitFailure;
  }
  auto doc = artifact_header(kDsFormat, cfg);
  doc["records"] = std::move(records);
  doc["summary"] = {{"subjects", jobs.size()},
                    {"series", tasks.size()},
                    {"failed_subjects", failed_subjects},
                    {"failed_series", failed_series}};
  write_json(o.out, doc);
  return kExitOk;
}

// ---- features ----

bool record_complete(const DsRecord& r) {
  if (r.failure || r.rois.empty()) return false;
  return std::all_of(r.rois.begin(), r.rois.end(), [](const auto& kv) { return kv.second.result.has_value(); });
}

int cmd_features(const FeaturesOptions& o, const RunConfig&, bool fail_fast) {
  if (o.ds.empty() || o.out.empty()) throw UsageError("features: --ds and --out are required");
  const auto records = read_ds_records(o.ds);
  std::vector<std::optional<ingest::CohortLabel>> labels;

  if (!o.ablation_roi.empty()) {
    std::vector<mlharness::CvPair> pairs;
    for (const auto& r : records) {
      const auto it = r.rois.find(o.ablation_roi);
      const bool ok = it != r.rois.end() && it->second.result;
      if (!ok) {
        if (fail_fast)
          throw Error(ErrorCode::MissingValue, "subject '" + r.subject_id + "' has no result for " + o.ablation_roi);
        std::cerr << "dsm features: skipping " << r.subject_id << " (no result for " << o.ablation_roi << ")\n";
        continue;
      }
      pairs.push_back({r.subject_id, it->second.result->cv1, it->second.result->cv2});
      labels.push_back(r.label);
    }
    write_feature_csv(o.out, mlharness::ablation_features(pairs), labels);
    return kExitOk;
  }

  std::vector<mlharness::SubjectDsResults> rows;
  for (const auto& r : records) {
    if (!record_complete(r) && !fail_fast) {
      std::cerr << "dsm features: skipping " << r.subject_id << " (incomplete DS results)\n";
      continue;
    }
    mlharness::SubjectDsResults s{r.subject_id, {}};
    for (const auto& [roi, out] : r.rois) s.by_roi[roi] = out.result;
    rows.push_back(std::move(s));
    labels.push_back(r.label);
  }
  write_feature_csv(o.out, mlharness::build_feature_matrix(rows, load_catalog(o.catalog)), labels);
  return kExitOk;
}

// ---- train / eval / importance ----

LabeledFeatures require_labels(const std::string& path) {
  auto f = read_feature_csv(path);
  if (!f.labeled) throw Error(ErrorCode::MissingValue, path + ": every row needs an HC/AD label");
  return f;
}

json model_document(const mlharness::TrainedModel& model, const RunConfig& cfg) {
  auto j = json::parse(mlharness::model_to_json(model));
  j["tool_version"] = kVersion;
  j["config"] = cfg.to_json();
  return j;
}

mlharness::TrainedModel load_model(const std::string& path) { return mlharness::model_from_json(read_text(path)); }

int cmd_train(const TrainOptions& o, RunConfig cfg) {
  if (o.features.empty() || o.out.empty()) throw UsageError("train: --features and --out are required");
  if (!o.model_kind.empty()) {
    if (!mlharness::parse_model_kind(o.model_kind))
      throw UsageError("--model: unknown model '" + o.model_kind +
                       "' (expected logistic, linear_svm, random_forest or gradient_boosting)");
    cfg.set("model.kind", o.model_kind);
  }
  const auto spec = cfg.model_spec();
  const auto data = require_labels(o.features);
  const auto model = mlharness::train(spec, data.x, data.y);
  write_json(o.out, model_document(model, cfg));

  if (!o.report.empty() || !o.roc.empty()) {
    const auto k = cfg.get_size("cv.k");
    const auto cv = mlharness::cross_validate(spec, data.x, data.y, k, cfg.stage_seed("cv"));
    auto doc = artifact_header(kEvalFormat, cfg);
    doc["model_kind"] = std::string(mlharness::kind_name(spec.kind));
    doc["protocol"] = "stratified_kfold";
    doc["k"] = cv.k;
    doc["cv_seed"] = cv.seed;
    doc["mean_accuracy"] = cv.mean_accuracy;
    doc["std_accuracy"] = cv.std_accuracy;
    doc["mean_auc"] = cv.mean_auc;
    json folds = json::array();
    for (std::size_t f = 0; f < cv.folds.size(); ++f) {
      auto fj = eval_to_json(cv.folds[f]);
      fj["fold"] = f;
      folds.push_back(std::move(fj));
    }
    doc["folds"] = std::move(folds);
    doc["pooled_out_of_fold"] = eval_to_json(cv.pooled);
    doc["training_fit"] = eval_to_json(mlharness::evaluate(model, data.x, data.y));
    if (!o.report.empty()) write_json(o.report, doc);
    if (!o.roc.empty()) write_roc_csv(o.roc, cv.pooled);
  }
  return kExitOk;
}

int cmd_eval(const EvalOptions& o, const RunConfig& cfg) {
  if (o.model.empty() || o.features.empty() || o.out.empty())
    throw UsageError("eval: --model, --features and --out are required");
  const auto model = load_model(o.model);
  const auto data = require_labels(o.features);
  const auto rep = mlharness::evaluate(model, data.x, data.y, o.threshold);
  auto doc = artifact_header(kEvalFormat, cfg);
  doc["model_kind"] = std::string(mlharness::kind_name(model.kind));
  doc["protocol"] = "holdout";
  doc["samples"] = data.x.rows();
  doc["evaluation"] = eval_to_json(rep);
  write_json(o.out, doc);
  if (!o.roc.empty()) write_roc_csv(o.roc, rep);
  return kExitOk;
}

int cmd_importance(const ImportanceOptions& o, const RunConfig& cfg) {
  if (o.model.empty() || o.features.empty() || o.out.empty())
    throw UsageError("importance: --model, --features and --out are required");
  const auto model = load_model(o.model);
  const auto data = require_labels(o.features);
  const auto repeats = o.repeats.value_or(cfg.get_size("importance.repeats"));
  if (repeats == 0) throw UsageError("--repeats must be positive");
  const auto rep = mlharness::permutation_importance(model, data.x, data.y, repeats, cfg.stage_seed("importance"));

  auto doc = artifact_header(kImportanceFormat, cfg);
  doc["method"] = rep.method;
  doc["repeats"] = rep.repeats;
  doc["seed"] = rep.seed;
  doc["baseline_accuracy"] = rep.baseline_accuracy;
  json items = json::array();
  std::vector<std::size_t> order(rep.importances.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
    items.push_back({{"feature", rep.feature_names[i]}, {"importance", rep.importances[i]}});
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rep.importances[a] > rep.importances[b]; });
  json sorted = json::array();
  for (auto i : order) sorted.push_back(items[i]);
  doc["importances"] = std::move(items);
  doc["sorted"] = std::move(sorted);
  write_json(o.out, doc);
  return kExitOk;
}

// ---- project ----

int cmd_project(const ProjectOptions& o, RunConfig cfg) {
  if (o.features.empty() || o.out.empty()) throw UsageError("project: --features and --out are required");
  if (o.perplexity) cfg.set("tsne.perplexity", csv::format_double(*o.perplexity));
  if (o.iterations) cfg.set("tsne.iterations", std::to_string(*o.iterations));
  const auto data = read_feature_csv(o.features);
  const mlharness::LabelVector labels = data.labeled ? data.y : mlharness::LabelVector{};
  if (o.method == "tsne") {
    write_text(o.out, project::embedding_to_csv(project::tsne_2d(data.x, cfg.tsne_config(), labels).embedding));
  } else if (o.method == "pca") {
    write_text(o.out, project::embedding_to_csv(project::pca_2d(data.x, labels).embedding));
  } else if (o.method == "scatter") {
    if (!data.labeled) throw Error(ErrorCode::MissingValue, o.features + ": scatter export needs labels");
    write_text(o.out, project::scatter_to_csv(project::scatter_export(data.x, data.y)));
  } else {
    throw UsageError("--method: expected tsne, pca or scatter, got '" + o.method + "'");
  }
  return kExitOk;
}

// ---- report ----

int cmd_report(const ReportOptions& o, const RunConfig& cfg) {
  if (o.ds.empty() || o.out.empty()) throw UsageError("report: --ds and --out are required");
  const auto records = read_ds_records(o.ds);
  std::vector<SubjectDs> subjects;
  for (const auto& r : records) {
    if (r.failure) continue;
    SubjectDs s{r.subject_id, r.label, {}};
    for (const auto& [roi, out] : r.rois)
      s.ds[roi] = out.result ? std::optional<double>(out.result->ds) : std::nullopt;
    subjects.push_back(std::move(s));
  }
  const auto rep = build_group_report(subjects, load_catalog(o.catalog), !o.no_paired);
  auto doc = artifact_header(kGroupReportFormat, cfg);
  doc["subjects"] = subjects.size();
  doc["views"] = group_report_to_json(rep);
  write_json(o.out, doc);
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Deviation-from-stochasticity measurement and subject classification"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "Config file (default: $" + std::string(kConfigEnvVar) + ")");
  app.add_option("--set", g.assignments, "Override a config key, e.g. --set ae.epochs=200");
  app.add_option("--seed", g.seed, "Global seed; every stage derives its own seed from it");
  app.add_option("--threads", g.threads, "Worker threads for batch DS (0 = all cores)");
  app.add_flag("--fail-fast", g.fail_fast, "Stop at the first failed series instead of recording it");
  app.add_flag("--keep-going", "Record per-series failures and continue (default)");

  SynthOptions so;
  auto* synth = app.add_subcommand("synth", "Generate synthetic series or a labeled cohort");
  synth->add_option("--kind", so.kind, "white_noise, ar1, flicker, sine, logistic_map or mix");
  synth->add_option("--length", so.length, "Samples per series");
  synth->add_option("--out", so.out, "Output CSV (single series)");
  synth->add_option("--column", so.column, "Header of the single-series CSV");
  synth->add_option("--phi", so.phi, "AR(1) coefficient");
  synth->add_option("--frequency", so.frequency, "Sine frequency in cycles per sample");
  synth->add_option("--amplitude", so.amplitude, "Sine amplitude");
  synth->add_option("--phase", so.phase, "Sine phase in radians");
  synth->add_flag("--random-phase", so.random_phase, "Draw the sine phase from the seed");
  synth->add_option("--r", so.r, "Logistic map parameter");
  synth->add_option("--x0", so.x0, "Logistic map start value");
  synth->add_option("--snr-db", so.snr_db, "Signal-to-noise ratio for mix");
  synth->add_flag("--cohort", so.cohort, "Write a two-class cohort with a manifest");
  synth->add_option("--out-dir", so.out_dir, "Cohort output directory");
  synth->add_option("--n-per-class", so.n_per_class, "Subjects per class");
  synth->add_option("--rois", so.rois, "ROIs per subject");
  synth->add_option("--kind-a", so.kind_a, "Signal kind for HC subjects");
  synth->add_option("--kind-b", so.kind_b, "Signal kind for AD subjects");

  DsOptions dso;
  auto* ds = app.add_subcommand("ds", "Compute DS for every ROI series");
  ds->add_option("--input", dso.inputs, "ROI table CSV (repeatable)");
  ds->add_option("--manifest", dso.manifest, "Cohort manifest CSV");
  ds->add_option("--nifti", dso.nifti, "4-D NIfTI-1 volume");
  ds->add_option("--mask", dso.masks, "ROI mask volume (repeatable)");
  ds->add_option("--subject", dso.subject, "Subject id for --nifti input");
  ds->add_option("--out", dso.out, "Output JSON");

  FeaturesOptions fo;
  auto* features = app.add_subcommand("features", "Assemble the subject x ROI feature matrix");
  features->add_option("--ds", fo.ds, "DS results JSON");
  features->add_option("--catalog", fo.catalog, "ROI catalog CSV (column order)");
  features->add_option("--out", fo.out, "Output feature CSV");
  features->add_option("--ablation-roi", fo.ablation_roi, "Emit cv1,cv2 of this ROI instead of DS values");

  TrainOptions to;
  auto* train = app.add_subcommand("train", "Train a classifier and cross-validate it");
  train->add_option("--features", to.features, "Labeled feature CSV");
  train->add_option("--model", to.model_kind, "logistic, linear_svm, random_forest or gradient_boosting");
  train->add_option("--out", to.out, "Output model JSON");
  train->add_option("--report", to.report, "Cross-validation report JSON");
  train->add_option("--roc", to.roc, "Out-of-fold ROC CSV");

  EvalOptions eo;
  auto* eval = app.add_subcommand("eval", "Evaluate a trained model on labeled features");
  eval->add_option("--model", eo.model, "Model JSON");
  eval->add_option("--features", eo.features, "Labeled feature CSV");
  eval->add_option("--out", eo.out, "Output report JSON");
  eval->add_option("--roc", eo.roc, "ROC CSV");
  eval->add_option("--threshold", eo.threshold, "Decision threshold (default 0.5, or 0 for SVM margins)");

  ImportanceOptions io;
  auto* importance = app.add_subcommand("importance", "Permutation feature importance");
  importance->add_option("--model", io.model, "Model JSON");
  importance->add_option("--features", io.features, "Labeled feature CSV");
  importance->add_option("--out", io.out, "Output JSON");
  importance->add_option("--repeats", io.repeats, "Permutations per feature");

  ProjectOptions po;
  auto* project = app.add_subcommand("project", "2-D embedding of a feature matrix");
  project->add_option("--features", po.features, "Feature CSV");
  project->add_option("--method", po.method, "tsne, pca or scatter");
  project->add_option("--out", po.out, "Output CSV");
  project->add_option("--perplexity", po.perplexity, "t-SNE perplexity");
  project->add_option("--iterations", po.iterations, "t-SNE iterations");

  ReportOptions ro;
  auto* report = app.add_subcommand("report", "Group and paired-ROI DS summaries");
  report->add_option("--ds", ro.ds, "DS results JSON");
  report->add_option("--catalog", ro.catalog, "ROI catalog CSV with pairings");
  report->add_option("--out", ro.out, "Output JSON");
  report->add_flag("--no-paired", ro.no_paired, "Skip the paired-ROI view");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    RunConfig cfg;
    std::string config_path = g.config_path;
    if (config_path.empty())
      if (const char* env = std::getenv(kConfigEnvVar); env && *env) config_path = env;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& a : g.assignments) cfg.set_assignment(a);
    if (g.seed) cfg.set("seed", std::to_string(*g.seed));
    if (g.threads) cfg.set("threads", std::to_string(*g.threads));
    cfg.global_seed();
    cfg.threads();

    if (synth->parsed()) return cmd_synth(so, cfg);
    if (ds->parsed()) return cmd_ds(dso, cfg, g.fail_fast);
    if (features->parsed()) return cmd_features(fo, cfg, g.fail_fast);
    if (train->parsed()) return cmd_train(to, cfg);
    if (eval->parsed()) return cmd_eval(eo, cfg);
    if (importance->parsed()) return cmd_importance(io, cfg);
    if (project->parsed()) return cmd_project(po, cfg);
    if (report->parsed()) return cmd_report(ro, cfg);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "dsm: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "dsm: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace dsm::cli
