#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "accent/features.hpp"
#include "accent/model.hpp"

namespace accent {

/// Repeated stratified holdout settings.
struct SplitSpec {
  double train_fraction = 0.7;
  int repetitions = 500;
  std::uint64_t master_seed = 0;
};

void validate(const SplitSpec& spec);

/// Label 1 (non-US) is the positive class.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + tn + fp + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& other);
};

ConfusionCounts confusion(const std::vector<int>& predictions, const std::vector<int>& truth);

/// (tp + tn) / N; throws InvalidArgument when N is zero.
double accuracy(const ConfusionCounts& counts);

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for repetition `rep_index`, independent of every other repetition.
std::uint64_t repetition_seed(std::uint64_t master_seed, std::uint64_t rep_index);

struct Split {
  Dataset train;
  Dataset test;
  std::vector<Eigen::Index> train_rows;  // ascending
  std::vector<Eigen::Index> test_rows;   // ascending
};

/// Shuffles each class with a generator seeded from (master_seed, rep_index)
/// and puts the first floor(train_fraction * n_k) of class k in train. Both
/// partitions keep the original row order.
Split stratified_split(const Dataset& data, const SplitSpec& spec, int rep_index);

struct CvResult {
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation, 0 when m = 1
  ConfusionCounts totals;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
  std::vector<double> accuracies;  // per repetition, in rep order
};

/// Train/predict on every repetition's split. Repetitions run on up to
/// `threads` workers; accuracy outputs do not depend on the thread count.
/// Training failures are rethrown tagged with the repetition index.
CvResult run_cv(const Dataset& data, const ClassifierConfig& config, const SplitSpec& spec,
                int threads = 1);

struct EvalRow {
  std::string classifier;
  Eigen::Index q = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
  int repetitions = 0;

  double total_seconds() const { return train_seconds + predict_seconds; }
};

struct EvalReport {
  std::vector<EvalRow> rows;
  /// Resolved run settings echoed into every serialized form.
  std::vector<std::pair<std::string, std::string>> config;
};

/// run_cv for every (q, classifier) pair, q-major, on the first q columns of
/// `data`.
EvalReport benchmark_grid(const Dataset& data, const std::vector<Eigen::Index>& q_levels,
                          const std::vector<ClassifierConfig>& classifiers, const SplitSpec& spec,
                          int threads = 1);

/// `classifier,q,mean_acc,std_acc,train_s,predict_s,reps`, preceded by
/// `# key=value` config lines.
void write_report_csv(std::ostream& out, const EvalReport& report);
std::string report_to_json(const EvalReport& report);

/// Tall tables for redrawing the accuracy and timing comparisons:
/// `classifier,q,mean_acc,std_acc` and `classifier,q,total_s`.
void write_accuracy_plot_data(std::ostream& out, const EvalReport& report);
void write_timing_plot_data(std::ostream& out, const EvalReport& report);

}  // namespace accent
