#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "accent/error.hpp"
#include "accent/evaluation.hpp"
#include "accent/text.hpp"
#include "support.hpp"

using namespace accent;
using doctest::Approx;

namespace {

Dataset balanced(std::uint64_t seed, int per_class, Eigen::Index p, double gap) {
  std::mt19937_64 gen(seed);
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(2, p);
  means(1, 0) = gap;
  const Eigen::MatrixXd chol = Eigen::MatrixXd::Identity(p, p);
  return test::gaussian_dataset(gen, means, {chol, chol}, {per_class, per_class});
}

ClassifierConfig make(ClassifierKind kind) {
  ClassifierConfig c;
  c.kind = kind;
  return c;
}

std::vector<ClassifierConfig> all_five() {
  return {make(ClassifierKind::kLda), make(ClassifierKind::kQda), make(ClassifierKind::kSvmRbf),
          make(ClassifierKind::kSvmPoly), make(ClassifierKind::kKnn)};
}

std::string accuracy_columns(const EvalReport& report) {
  std::string out;
  for (const auto& r : report.rows) {
    out += r.classifier + ',' + std::to_string(r.q) + ',' + format_double17(r.mean_accuracy) + ',' +
           format_double17(r.std_accuracy) + '\n';
  }
  return out;
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("stratified split sizes") {
    const Dataset d = balanced(1, 165, 3, 1.0);
    SplitSpec spec;
    spec.master_seed = 42;
    const Split s = stratified_split(d, spec, 0);
    CHECK(s.train.class_counts() == std::vector<Eigen::Index>{115, 115});
    CHECK(s.test.class_counts() == std::vector<Eigen::Index>{50, 50});
  }

  TEST_CASE("split determinism and partition") {
    const Dataset d = balanced(2, 40, 2, 1.0);
    SplitSpec spec;
    spec.master_seed = 9;
    spec.repetitions = 20;
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      const Split a = stratified_split(d, spec, rep);
      const Split b = stratified_split(d, spec, rep);
      CHECK(a.train_rows == b.train_rows);
      CHECK(a.test_rows == b.test_rows);
      CHECK(std::is_sorted(a.train_rows.begin(), a.train_rows.end()));
      std::vector<Eigen::Index> all = a.train_rows;
      all.insert(all.end(), a.test_rows.begin(), a.test_rows.end());
      std::sort(all.begin(), all.end());
      std::vector<Eigen::Index> expected(static_cast<std::size_t>(d.size()));
      std::iota(expected.begin(), expected.end(), 0);
      CHECK(all == expected);
      for (std::size_t i = 0; i < a.train_rows.size(); ++i) {
        CHECK(a.train.points.row(static_cast<Eigen::Index>(i)) == d.points.row(a.train_rows[i]));
        CHECK(a.train.labels[i] == d.labels[static_cast<std::size_t>(a.train_rows[i])]);
      }
      for (std::size_t k = 0; k < 2; ++k) {
        CHECK(std::abs(static_cast<double>(a.train.class_counts()[k]) - 0.7 * 40) < 1.0);
      }
    }
    CHECK(stratified_split(d, spec, 0).train_rows != stratified_split(d, spec, 1).train_rows);
  }

  TEST_CASE("split preconditions") {
    const Dataset d = balanced(3, 2, 2, 1.0);
    SplitSpec spec;
    spec.train_fraction = 0.3;
    CHECK_THROWS_AS(stratified_split(d, spec, 0), InvalidArgument);
    spec.train_fraction = 0.5;
    CHECK_THROWS_AS(stratified_split(d, spec, spec.repetitions), InvalidArgument);
    spec.train_fraction = 1.0;
    CHECK_THROWS_AS(validate(spec), InvalidArgument);
    spec.train_fraction = 0.7;
    spec.repetitions = 0;
    CHECK_THROWS_AS(validate(spec), InvalidArgument);
  }

  TEST_CASE("confusion and accuracy examples") {
    const ConfusionCounts a = confusion({1, 1, 0, 0}, {1, 1, 0, 0});
    CHECK(a.tp == 2);
    CHECK(a.tn == 2);
    CHECK(a.fp == 0);
    CHECK(a.fn == 0);
    const ConfusionCounts b = confusion({1, 1, 1, 1}, {0, 0, 0, 0});
    CHECK(b.fp == 4);
    CHECK(b.tp + b.tn + b.fn == 0);
    const ConfusionCounts c = confusion({1, 0}, {0, 1});
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
    CHECK(c.total() == 2);
    CHECK_THROWS_AS(confusion({1}, {1, 0}), DimensionError);

    CHECK(accuracy(ConfusionCounts{40, 35, 15, 10}) == 0.75);
    CHECK(accuracy(a) == 1.0);
    CHECK(accuracy(b) == 0.0);
    CHECK_THROWS_AS(accuracy(ConfusionCounts{}), InvalidArgument);
  }

  TEST_CASE("SplitMix64 reference outputs") {
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(splitmix64(1) == 0x910A2DEC89025CC1ULL);
    CHECK(repetition_seed(7, 3) == 0xCB64210618F5BB70ULL);
  }

  TEST_CASE("random labels give chance accuracy") {
    // Repetitions share one dataset, so the spread comes from independent
    // null datasets rather than from the repetitions of one.
    for (const auto kind : {ClassifierKind::kLda, ClassifierKind::kKnn}) {
      std::vector<double> means;
      for (std::uint64_t trial = 0; trial < 20; ++trial) {
        std::mt19937_64 gen(1100 + trial);
        Dataset d;
        d.points = test::random_matrix(gen, 330, 5);
        d.labels.assign(330, 0);
        std::fill(d.labels.begin() + 165, d.labels.end(), 1);
        d.ids.resize(330);
        SplitSpec spec;
        spec.master_seed = trial;
        spec.repetitions = 500;
        means.push_back(run_cv(d, make(kind), spec).mean_accuracy);
      }
      const double grand = std::accumulate(means.begin(), means.end(), 0.0) / 20.0;
      double ss = 0.0;
      for (double m : means) ss += (m - grand) * (m - grand);
      const double se = std::sqrt(ss / 19.0) / std::sqrt(20.0);
      CAPTURE(grand);
      CAPTURE(se);
      CHECK(std::abs(grand - 0.5) <= 3.0 * se);
    }
  }

  TEST_CASE("separated clusters are classified perfectly") {
    std::mt19937_64 gen(13);
    Eigen::MatrixXd means(2, 3);
    means << 0, 0, 0, 1, 1, 1;
    const Eigen::MatrixXd chol = Eigen::MatrixXd::Identity(3, 3) * 0.05;
    const Dataset d = test::gaussian_dataset(gen, means, {chol, chol}, {60, 60});
    SplitSpec spec;
    spec.master_seed = 14;
    spec.repetitions = 20;
    for (const auto& config : all_five()) {
      CAPTURE(to_string(config.kind));
      const CvResult r = run_cv(d, config, spec);
      CHECK(r.mean_accuracy == 1.0);
      CHECK(r.std_accuracy == 0.0);
      CHECK(r.totals.total() == 20 * 36);
    }
  }

  TEST_CASE("aggregates agree with per-repetition values") {
    const Dataset d = balanced(15, 50, 4, 1.0);
    SplitSpec spec;
    spec.master_seed = 16;
    spec.repetitions = 30;
    const CvResult r = run_cv(d, make(ClassifierKind::kQda), spec);
    REQUIRE(r.accuracies.size() == 30);
    const double mean = std::accumulate(r.accuracies.begin(), r.accuracies.end(), 0.0) / 30.0;
    CHECK(std::abs(mean - r.mean_accuracy) <= 1e-12);
    for (double a : r.accuracies) CHECK((a >= 0.0 && a <= 1.0));
    double ss = 0.0;
    for (double a : r.accuracies) ss += (a - mean) * (a - mean);
    CHECK(r.std_accuracy == Approx(std::sqrt(ss / 29.0)).epsilon(1e-12));
    CHECK(r.train_seconds >= 0.0);
    CHECK(r.predict_seconds >= 0.0);

    spec.repetitions = 1;
    CHECK(run_cv(d, make(ClassifierKind::kQda), spec).std_accuracy == 0.0);
  }

  TEST_CASE("results do not depend on the thread count") {
    const Dataset d = balanced(17, 60, 4, 1.0);
    SplitSpec spec;
    spec.master_seed = 18;
    spec.repetitions = 25;
    for (const auto& config : all_five()) {
      CHECK(run_cv(d, config, spec, 1).accuracies == run_cv(d, config, spec, 4).accuracies);
    }
  }

  TEST_CASE("training failures carry the repetition index") {
    Dataset d = balanced(19, 20, 3, 1.0);
    SplitSpec spec;
    spec.master_seed = 20;
    spec.repetitions = 3;
    ClassifierConfig bad = make(ClassifierKind::kSvmRbf);
    bad.max_iterations = 1;
    try {
      run_cv(d, bad, spec);
      FAIL("expected a failure");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("repetition 0") != std::string::npos);
    }
  }

  TEST_CASE("grid shape, order and equivalence to single runs") {
    const Dataset d = balanced(21, 50, 12, 1.5);
    SplitSpec spec;
    spec.master_seed = 22;
    spec.repetitions = 5;
    const std::vector<Eigen::Index> qs = {2, 4, 6, 9, 12};
    const EvalReport report = benchmark_grid(d, qs, all_five(), spec);
    REQUIRE(report.rows.size() == 25);
    for (std::size_t i = 0; i < 25; ++i) {
      CHECK(report.rows[i].q == qs[i / 5]);
      CHECK(report.rows[i].classifier == to_string(all_five()[i % 5].kind));
      CHECK(report.rows[i].repetitions == 5);
    }

    const EvalReport single = benchmark_grid(d, {6}, {make(ClassifierKind::kKnn)}, spec);
    REQUIRE(single.rows.size() == 1);
    const CvResult direct = run_cv(truncate_features(d, 6), make(ClassifierKind::kKnn), spec);
    CHECK(single.rows[0].mean_accuracy == direct.mean_accuracy);
    CHECK(single.rows[0].std_accuracy == direct.std_accuracy);

    std::vector<ClassifierConfig> reversed = all_five();
    std::reverse(reversed.begin(), reversed.end());
    const EvalReport other = benchmark_grid(d, {12, 4}, reversed, spec);
    for (const auto& row : other.rows) {
      const auto match = std::find_if(report.rows.begin(), report.rows.end(), [&](const EvalRow& r) {
        return r.q == row.q && r.classifier == row.classifier;
      });
      REQUIRE(match != report.rows.end());
      CHECK(match->mean_accuracy == row.mean_accuracy);
      CHECK(match->std_accuracy == row.std_accuracy);
    }

    const EvalReport again = benchmark_grid(d, qs, all_five(), spec, 3);
    CHECK(accuracy_columns(again) == accuracy_columns(report));
    CHECK_THROWS_AS(benchmark_grid(d, {13}, all_five(), spec), DimensionError);
  }

  TEST_CASE("k-NN training is cheaper than SVM training") {
    const Dataset d = balanced(23, 100, 8, 1.0);
    SplitSpec spec;
    spec.master_seed = 24;
    spec.repetitions = 10;
    const CvResult knn = run_cv(d, make(ClassifierKind::kKnn), spec);
    const CvResult svm = run_cv(d, make(ClassifierKind::kSvmRbf), spec);
    CHECK(knn.train_seconds < svm.train_seconds);
  }

  TEST_CASE("report serializations") {
    EvalReport report;
    report.config = {{"seed", "7"}, {"reps", "2"}};
    report.rows.push_back({"knn", 12, 0.5, 0.25, 1.5, 0.25, 2});
    std::ostringstream csv;
    write_report_csv(csv, report);
    CHECK(csv.str() ==
          "# seed=7\n# reps=2\nclassifier,q,mean_acc,std_acc,train_s,predict_s,reps\n"
          "knn,12,0.5,0.25,1.5,0.25,2\n");

    const auto doc = nlohmann::json::parse(report_to_json(report));
    CHECK(doc["config"]["seed"] == "7");
    CHECK(doc["rows"].size() == 1);
    CHECK(doc["rows"][0]["classifier"] == "knn");
    CHECK(doc["rows"][0]["q"] == 12);
    CHECK(doc["rows"][0]["total_s"].get<double>() == 1.75);

    std::ostringstream acc, time;
    write_accuracy_plot_data(acc, report);
    write_timing_plot_data(time, report);
    CHECK(acc.str() == "classifier,q,mean_acc,std_acc\nknn,12,0.5,0.25\n");
    CHECK(time.str() == "classifier,q,total_s\nknn,12,1.75\n");
  }
}
