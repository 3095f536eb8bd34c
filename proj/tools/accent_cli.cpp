// Command-line front end: synth, extract, train, predict, evaluate, benchmark.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "accent/audio.hpp"
#include "accent/error.hpp"
#include "accent/evaluation.hpp"
#include "accent/features.hpp"
#include "accent/mfcc.hpp"
#include "accent/model.hpp"
#include "accent/pipeline.hpp"
#include "accent/synth.hpp"
#include "accent/text.hpp"
#include "accent/version.hpp"

namespace fs = std::filesystem;
using accent::format_double;

namespace {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

const std::vector<Eigen::Index> kPaperQLevels = {12, 19, 26, 33, 39};
const std::vector<std::string> kAllClassifiers = {"lda", "qda", "svm-rbf", "svm-poly", "knn"};

struct MfccFlags {
  std::string config_file;
  std::optional<double> alpha, frame_ms, hop_ms, f_low, f_high;
  std::optional<int> num_filters, num_coeffs;
  bool no_c0 = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--mfcc-config", config_file, "key=value file with MFCC settings");
    cmd->add_option("--alpha", alpha, "pre-emphasis coefficient [0.97]");
    cmd->add_option("--frame-ms", frame_ms, "frame length in ms [25]");
    cmd->add_option("--hop-ms", hop_ms, "frame hop in ms [10]");
    cmd->add_option("--num-filters", num_filters, "mel filter count M [26]");
    cmd->add_option("--num-coeffs", num_coeffs, "cepstral coefficient count q [13]");
    cmd->add_option("--f-low", f_low, "lowest filter edge in Hz [0]");
    cmd->add_option("--f-high", f_high, "highest filter edge in Hz [Nyquist]");
    cmd->add_flag("--no-c0", no_c0, "drop c0 and return c1..cq");
  }

  accent::MfccConfig resolve(accent::MfccConfig base = {}) const {
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw accent::IoError("cannot open '" + config_file + "'");
      std::stringstream text;
      text << in.rdbuf();
      for (const auto& [key, value] : accent::parse_key_values(text.str())) {
        accent::apply_key_value(base, key, value);
      }
    }
    if (alpha) base.alpha = *alpha;
    if (frame_ms) base.frame_ms = *frame_ms;
    if (hop_ms) base.hop_ms = *hop_ms;
    if (num_filters) base.num_filters = *num_filters;
    if (num_coeffs) base.num_coeffs = *num_coeffs;
    if (f_low) base.f_low = *f_low;
    if (f_high) base.f_high = *f_high;
    if (no_c0) base.include_c0 = false;
    accent::validate(base);
    return base;
  }
};

struct ClassifierFlags {
  std::string classifier = "knn";
  std::optional<double> C, coef0, ridge, tol;
  std::string gamma;
  std::optional<int> degree, k;
  std::optional<std::int64_t> max_iter;
  std::string metric = "euclidean";

  void add(CLI::App* cmd) {
    cmd->add_option("--classifier", classifier, "lda, qda, svm-rbf, svm-poly or knn [knn]");
    cmd->add_option("--C", C, "SVM box constraint [1]");
    cmd->add_option("--gamma", gamma, "RBF width: a number, auto (1/p) or scale (1/(p var X)) [auto]");
    cmd->add_option("--degree", degree, "polynomial degree [2]");
    cmd->add_option("--coef0", coef0, "polynomial offset c [1]");
    cmd->add_option("--tol", tol, "SMO KKT tolerance [1e-3]");
    cmd->add_option("--max-iter", max_iter, "SMO iteration cap [max(1e7, 100n)]");
    cmd->add_option("--k", k, "k-NN neighbour count [3]");
    cmd->add_option("--metric", metric, "k-NN metric: euclidean or manhattan [euclidean]");
    cmd->add_option("--ridge", ridge, "covariance ridge for LDA/QDA [1e-6 trace/p]");
  }

  // `item` is a classifier name optionally followed by `:key=value` overrides,
  // e.g. `svm-poly:C=1e-5`; overrides win over the shared flags.
  accent::ClassifierConfig resolve(const std::string& item) const {
    const auto parts = accent::split(item, ':');
    accent::ClassifierConfig c;
    c.kind = accent::parse_classifier(parts.front());
    if (C) c.C = *C;
    if (!gamma.empty()) accent::apply_key_value(c, "gamma", gamma);
    if (degree) c.degree = *degree;
    if (coef0) c.coef0 = *coef0;
    if (tol) c.tol = *tol;
    if (max_iter) c.max_iterations = *max_iter;
    if (k) c.k = *k;
    c.metric = accent::parse_metric(metric);
    c.ridge = ridge;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto eq = parts[i].find('=');
      if (eq == std::string::npos) throw accent::InvalidArgument("expected key=value in '" + item + "'");
      accent::apply_key_value(c, parts[i].substr(0, eq), parts[i].substr(eq + 1));
    }
    accent::validate(c);
    return c;
  }
};

struct SplitFlags {
  int reps = 500;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--reps", reps, "holdout repetitions m [500]");
    cmd->add_option("--train-fraction", train_fraction, "per-class training share [0.7]");
    cmd->add_option("--seed", seed, "master seed for all randomness")->required();
  }

  accent::SplitSpec resolve() const {
    accent::SplitSpec s{train_fraction, reps, seed};
    accent::validate(s);
    return s;
  }
};

void append(KeyValues& out, const std::string& prefix, const std::string& key_values) {
  for (auto& [k, v] : accent::parse_key_values(key_values)) out.emplace_back(prefix + k, v);
}

KeyValues header(const std::string& subcommand) {
  return {{"tool_version", accent::kVersionString}, {"subcommand", subcommand}};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw accent::IoError("cannot create '" + path.string() + "'");
  out << text;
  if (!out) throw accent::IoError("error writing '" + path.string() + "'");
}

std::string key_value_text(const KeyValues& kv) {
  std::string s;
  for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
  return s;
}

// Loads a labelled feature CSV, keeping the first q columns when q is given.
accent::Dataset load_dataset(const fs::path& path, std::optional<int> q, KeyValues* metadata = nullptr) {
  const accent::FeatureTable table = accent::load_feature_csv(path);
  if (metadata) *metadata = table.metadata;
  accent::Dataset data = accent::to_dataset(table.rows);
  if (q) data = accent::truncate_features(data, *q);
  return data;
}

std::vector<Eigen::Index> parse_q_levels(const std::string& text) {
  std::vector<Eigen::Index> out;
  for (const auto& part : accent::split(text, ',')) out.push_back(accent::parse_int(part, "q level"));
  return out;
}

void write_report(const std::string& prefix, const accent::EvalReport& report, bool plot_data) {
  std::ostringstream csv;
  accent::write_report_csv(csv, report);
  write_text(prefix + ".csv", csv.str());
  write_text(prefix + ".json", accent::report_to_json(report));
  if (plot_data) {
    std::ostringstream acc, time;
    accent::write_accuracy_plot_data(acc, report);
    accent::write_timing_plot_data(time, report);
    write_text(prefix + "_accuracy.csv", acc.str());
    write_text(prefix + "_time.csv", time.str());
  }
}

void print_report(const accent::EvalReport& report) {
  std::cout << "classifier  q   mean_acc  std_acc   train_s   predict_s\n";
  for (const auto& r : report.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %3ld  %.4f    %.4f    %8.3f  %8.3f\n", r.classifier.c_str(),
                  static_cast<long>(r.q), r.mean_accuracy, r.std_accuracy, r.train_seconds,
                  r.predict_seconds);
    std::cout << line;
  }
}

// Extracts features for a manifest; returns false and reports every failed
// clip when any clip fails.
bool extract_to(const fs::path& manifest_path, const accent::MfccConfig& config, int threads,
                const fs::path& out_path, KeyValues metadata) {
  const accent::CorpusManifest manifest = accent::load_manifest(manifest_path);
  const auto result = accent::extract_features(manifest, manifest_path.parent_path(), config, threads);
  if (!result.failures.empty()) {
    std::cerr << "error: " << result.failures.size() << " of " << manifest.entries.size()
              << " clips failed:\n";
    for (const auto& f : result.failures) std::cerr << "  " << f << '\n';
    return false;
  }
  accent::FeatureTable table;
  table.rows = result.rows;
  table.first_coeff = config.first_coeff();
  table.metadata = std::move(metadata);
  table.metadata.emplace_back("manifest", manifest_path.string());
  append(table.metadata, "", accent::to_key_value(config));
  accent::save_feature_csv(out_path, table);
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speaker accent recognition from mean MFCC vectors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("accent ") + accent::kVersionString + " (model format " +
                                        std::to_string(accent::kModelFormatVersion) + ", feature format " +
                                        std::to_string(accent::kFeatureFormatVersion) + ")");

  int threads = 1;

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic two-accent WAV corpus and manifest");
  accent::SynthSpec synth_spec;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_spec.seed, "generator seed [1]");
  synth->add_option("--speakers", synth_spec.speakers_per_class, "speakers per class [11]");
  synth->add_option("--words", synth_spec.words_per_speaker, "clips per speaker [15]");
  synth->add_option("--rate", synth_spec.sample_rate, "sample rate in Hz [44100]");
  synth->add_option("--duration", synth_spec.duration_s, "clip length in seconds [1]");
  synth->add_option("--separation", synth_spec.separation, "relative formant shift between classes [0.08]");
  synth->add_option("--tilt", synth_spec.tilt_db_per_octave, "non-US spectral tilt in dB/octave [2.5]");
  synth->add_option("--jitter", synth_spec.formant_jitter, "per-clip relative formant jitter [0.04]");
  synth->add_option("--speaker-spread", synth_spec.speaker_spread, "vocal-tract scale half-range [0.05]");
  synth->add_option("--level-spread", synth_spec.level_spread, "relative peak-level half-range [0.1]");
  synth->add_option("--noise", synth_spec.noise_level, "white-noise standard deviation [0.003]");

  // extract
  auto* extract = app.add_subcommand("extract", "Compute mean-MFCC feature vectors for a manifest");
  std::string extract_manifest, extract_out;
  MfccFlags extract_mfcc;
  extract->add_option("--manifest", extract_manifest, "path,label CSV")->required();
  extract->add_option("--out", extract_out, "feature CSV to write")->required();
  extract_mfcc.add(extract);
  extract->add_option("--threads", threads, "worker threads [1]");

  // train
  auto* train = app.add_subcommand("train", "Fit one classifier on a feature CSV");
  std::string train_features, train_model;
  std::optional<int> train_q;
  ClassifierFlags train_clf;
  train->add_option("--features", train_features, "labelled feature CSV")->required();
  train->add_option("--model", train_model, "model file to write")->required();
  train->add_option("--q", train_q, "use only the first q feature columns");
  train_clf.add(train);

  // predict
  auto* predict = app.add_subcommand("predict", "Label feature vectors with a saved model");
  std::string predict_features, predict_model, predict_out;
  predict->add_option("--model", predict_model, "model file")->required();
  predict->add_option("--features", predict_features, "feature CSV")->required();
  predict->add_option("--out", predict_out, "prediction CSV to write (stdout when omitted)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Repeated stratified holdout evaluation");
  std::string eval_features, eval_report;
  std::optional<int> eval_q;
  bool eval_grid = false, eval_plot = false;
  std::string eval_q_levels = "12,19,26,33,39";
  std::string eval_classifiers = "lda,qda,svm-rbf,svm-poly,knn";
  ClassifierFlags eval_clf;
  SplitFlags eval_split;
  evaluate->add_option("--features", eval_features, "labelled feature CSV")->required();
  evaluate->add_option("--report", eval_report, "report path prefix (.csv, .json, .config)")->required();
  evaluate->add_option("--q", eval_q, "single run: use only the first q feature columns");
  evaluate->add_flag("--grid", eval_grid, "run every classifier at every q level");
  evaluate->add_option("--q-levels", eval_q_levels, "grid q levels [12,19,26,33,39]");
  evaluate->add_option("--classifiers", eval_classifiers,
                       "grid classifiers, each optionally with :key=value overrides [all five]");
  evaluate->add_flag("--plot-data", eval_plot, "also write tall accuracy/timing tables");
  evaluate->add_option("--threads", threads, "worker threads; 1 for meaningful timings [1]");
  eval_clf.add(evaluate);
  eval_split.add(evaluate);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Extract features and run the full q x classifier grid");
  std::string bench_manifest, bench_report, bench_features;
  std::string bench_q_levels = "12,19,26,33,39";
  std::string bench_classifiers = "lda,qda,svm-rbf,svm-poly,knn";
  bool bench_plot = false;
  MfccFlags bench_mfcc;
  ClassifierFlags bench_clf;
  SplitFlags bench_split;
  bench->add_option("--manifest", bench_manifest, "path,label CSV")->required();
  bench->add_option("--report", bench_report, "report path prefix")->required();
  bench->add_option("--features-out", bench_features, "feature CSV to write [<report>_features.csv]");
  bench->add_option("--q-levels", bench_q_levels, "q levels [12,19,26,33,39]");
  bench->add_option("--classifiers", bench_classifiers,
                    "classifiers, each optionally with :key=value overrides [all five]");
  bench->add_flag("--plot-data", bench_plot, "also write tall accuracy/timing tables");
  bench->add_option("--threads", threads, "worker threads; 1 for meaningful timings [1]");
  bench_mfcc.add(bench);
  bench_clf.add(bench);
  bench_split.add(bench);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const auto manifest = accent::write_corpus(synth_out, synth_spec);
      std::cout << "wrote " << manifest.string() << '\n';
      return 0;
    }

    if (*extract) {
      const accent::MfccConfig config = extract_mfcc.resolve();
      return extract_to(extract_manifest, config, threads, extract_out, header("extract")) ? 0 : 1;
    }

    if (*train) {
      KeyValues feature_meta;
      const accent::Dataset data = load_dataset(train_features, train_q, &feature_meta);
      const accent::ClassifierConfig config = train_clf.resolve(train_clf.classifier);
      const accent::TrainedModel model = accent::train_classifier(config, data);
      KeyValues meta = header("train");
      meta.emplace_back("features", train_features);
      meta.emplace_back("q", std::to_string(data.dim()));
      append(meta, "", accent::to_key_value(config));
      for (const auto& [k, v] : feature_meta) meta.emplace_back("feature." + k, v);
      accent::save_model(train_model, model, meta);
      return 0;
    }

    if (*predict) {
      const accent::TrainedModel model = accent::load_model(predict_model);
      const accent::FeatureTable table = accent::load_feature_csv(predict_features);
      std::ostringstream out;
      out << "# tool_version=" << accent::kVersionString << "\n# subcommand=predict\n"
          << "# model=" << predict_model << "\n# features=" << predict_features << '\n'
          << "source_id,predicted_label\n";
      for (const auto& row : table.rows) {
        if (row.values.size() != accent::model_dimension(model)) {
          throw accent::DimensionError("feature width " + std::to_string(row.values.size()) +
                                       " does not match model dimension " +
                                       std::to_string(accent::model_dimension(model)));
        }
        out << row.source_id << ',' << accent::predict(model, row.values) << '\n';
      }
      if (predict_out.empty()) {
        std::cout << out.str();
      } else {
        write_text(predict_out, out.str());
      }
      return 0;
    }

    if (*evaluate || *bench) {
      const bool is_bench = static_cast<bool>(*bench);
      const SplitFlags& split_flags = is_bench ? bench_split : eval_split;
      const ClassifierFlags& clf_flags = is_bench ? bench_clf : eval_clf;
      const std::string& prefix = is_bench ? bench_report : eval_report;
      const bool grid = is_bench || eval_grid;
      const std::vector<Eigen::Index> q_levels = parse_q_levels(is_bench ? bench_q_levels : eval_q_levels);
      const std::string names_text = grid ? (is_bench ? bench_classifiers : eval_classifiers) : clf_flags.classifier;

      KeyValues config = header(is_bench ? "benchmark" : "evaluate");
      config.emplace_back("seed", std::to_string(split_flags.seed));
      config.emplace_back("reps", std::to_string(split_flags.reps));
      config.emplace_back("train_fraction", format_double(split_flags.train_fraction));
      config.emplace_back("threads", std::to_string(threads));
      std::vector<accent::ClassifierConfig> classifiers;
      for (const auto& item : accent::split(names_text, ',')) {
        classifiers.push_back(clf_flags.resolve(item));
        const std::string name(accent::to_string(classifiers.back().kind));
        for (std::size_t i = 0; i + 1 < classifiers.size(); ++i) {
          if (classifiers[i].kind == classifiers.back().kind) {
            throw accent::InvalidArgument("classifier '" + name + "' listed twice");
          }
        }
        append(config, "classifier." + name + ".", accent::to_key_value(classifiers.back()));
      }

      fs::path features_path = is_bench ? fs::path(bench_features.empty() ? prefix + "_features.csv" : bench_features)
                                        : fs::path(eval_features);
      accent::MfccConfig mfcc;
      if (is_bench) {
        // Extract once at the largest q; every grid level reuses a prefix of it.
        const Eigen::Index q_max = *std::max_element(q_levels.begin(), q_levels.end());
        accent::MfccConfig base;
        base.num_coeffs = static_cast<int>(q_max);
        base.num_filters = std::max(40, static_cast<int>(q_max) + 1);
        mfcc = bench_mfcc.resolve(base);
        append(config, "mfcc.", accent::to_key_value(mfcc));
        config.emplace_back("manifest", bench_manifest);
      }
      config.emplace_back("features", features_path.string());
      if (grid) {
        std::string q_text;
        for (auto q : q_levels) q_text += (q_text.empty() ? "" : ",") + std::to_string(q);
        config.emplace_back("q_levels", q_text);
      } else if (eval_q) {
        config.emplace_back("q", std::to_string(*eval_q));
      }
      write_text(prefix + ".config", key_value_text(config));

      if (is_bench && !extract_to(bench_manifest, mfcc, threads, features_path, header("benchmark"))) {
        return 1;
      }
      const accent::SplitSpec spec = split_flags.resolve();
      accent::EvalReport report;
      if (grid) {
        report = accent::benchmark_grid(load_dataset(features_path, std::nullopt), q_levels, classifiers,
                                        spec, threads);
      } else {
        const accent::Dataset data = load_dataset(features_path, eval_q);
        const auto cv = accent::run_cv(data, classifiers.front(), spec, threads);
        report.rows.push_back({std::string(accent::to_string(classifiers.front().kind)), data.dim(), cv.mean_accuracy, cv.std_accuracy,
                               cv.train_seconds, cv.predict_seconds, spec.repetitions});
      }
      report.config = config;
      write_report(prefix, report, is_bench ? bench_plot : eval_plot);
      print_report(report);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
