#include "accent/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "accent/error.hpp"
#include "accent/text.hpp"

namespace accent {
namespace {

// Unbiased draw from [0, bound) with portable results (the standard
// distributions are implementation-defined).
std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = gen();
  } while (draw >= limit);
  return draw % bound;
}

void shuffle(std::vector<Eigen::Index>& items, std::mt19937_64& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(gen, i));
    std::swap(items[i - 1], items[j]);
  }
}

struct RepOutcome {
  double accuracy = 0.0;
  ConfusionCounts counts;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

RepOutcome run_repetition(const Dataset& data, const ClassifierConfig& config,
                          const SplitSpec& spec, int rep) {
  using Clock = std::chrono::steady_clock;
  const Split split = stratified_split(data, spec, rep);
  RepOutcome out;
  const auto t0 = Clock::now();
  const TrainedModel model = train_classifier(config, split.train);
  const auto t1 = Clock::now();
  const std::vector<int> predictions = predict_all(model, split.test.points);
  const auto t2 = Clock::now();
  out.counts = confusion(predictions, split.test.labels);
  out.accuracy = accuracy(out.counts);
  out.train_seconds = std::chrono::duration<double>(t1 - t0).count();
  out.predict_seconds = std::chrono::duration<double>(t2 - t1).count();
  return out;
}

}  // namespace

void validate(const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must lie strictly between 0 and 1");
  }
  if (spec.repetitions < 1) throw InvalidArgument("repetitions must be at least 1");
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  tp += other.tp;
  tn += other.tn;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

ConfusionCounts confusion(const std::vector<int>& predictions, const std::vector<int>& truth) {
  if (predictions.size() != truth.size()) {
    throw DimensionError("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                         std::to_string(truth.size()) + " labels");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predictions[i];
    const int t = truth[i];
    if ((p != 0 && p != 1) || (t != 0 && t != 1)) throw InvalidArgument("confusion: labels must be 0 or 1");
    if (p == 1 && t == 1) ++c.tp;
    else if (p == 0 && t == 0) ++c.tn;
    else if (p == 1) ++c.fp;
    else ++c.fn;
  }
  return c;
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() <= 0) throw InvalidArgument("accuracy of an empty confusion table");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t repetition_seed(std::uint64_t master_seed, std::uint64_t rep_index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(rep_index + 0x632BE59BD9B4E019ULL));
}

Split stratified_split(const Dataset& data, const SplitSpec& spec, int rep_index) {
  validate(spec);
  if (rep_index < 0 || rep_index >= spec.repetitions) {
    throw InvalidArgument("rep_index " + std::to_string(rep_index) + " outside [0, " +
                          std::to_string(spec.repetitions) + ")");
  }
  const int n_classes = data.num_classes();
  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(std::max(n_classes, 0)));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    members[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])].push_back(i);
  }
  std::mt19937_64 gen(repetition_seed(spec.master_seed, static_cast<std::uint64_t>(rep_index)));
  Split split;
  for (std::size_t k = 0; k < members.size(); ++k) {
    auto& rows = members[k];
    const auto n_train = static_cast<std::size_t>(
        std::floor(spec.train_fraction * static_cast<double>(rows.size())));
    if (n_train == 0 || n_train == rows.size()) {
      throw InvalidArgument("class " + std::to_string(k) + " has " + std::to_string(rows.size()) +
                            " points; a train fraction of " + format_double(spec.train_fraction) +
                            " leaves one partition empty");
    }
    shuffle(rows, gen);
    split.train_rows.insert(split.train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test_rows.insert(split.test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(split.train_rows.begin(), split.train_rows.end());
  std::sort(split.test_rows.begin(), split.test_rows.end());
  split.train = subset(data, split.train_rows);
  split.test = subset(data, split.test_rows);
  return split;
}

CvResult run_cv(const Dataset& data, const ClassifierConfig& config, const SplitSpec& spec,
                int threads) {
  validate(spec);
  validate_training_set(data);
  const int m = spec.repetitions;
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(m));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(m));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int rep = next++; rep < m; rep = next++) {
      try {
        outcomes[static_cast<std::size_t>(rep)] = run_repetition(data, config, spec, rep);
      } catch (...) {
        errors[static_cast<std::size_t>(rep)] = std::current_exception();
      }
    }
  };
  const int n_workers = std::clamp(threads, 1, m);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (int rep = 0; rep < m; ++rep) {
    if (!errors[static_cast<std::size_t>(rep)]) continue;
    try {
      std::rethrow_exception(errors[static_cast<std::size_t>(rep)]);
    } catch (const std::exception& e) {
      throw Error(std::string(to_string(config.kind)) + " failed in repetition " +
                  std::to_string(rep) + ": " + e.what());
    }
  }

  CvResult result;
  double sum = 0.0;
  for (const auto& o : outcomes) {
    result.accuracies.push_back(o.accuracy);
    result.totals += o.counts;
    result.train_seconds += o.train_seconds;
    result.predict_seconds += o.predict_seconds;
    sum += o.accuracy;
  }
  result.mean_accuracy = sum / m;
  if (m > 1) {
    double ss = 0.0;
    for (double a : result.accuracies) ss += (a - result.mean_accuracy) * (a - result.mean_accuracy);
    result.std_accuracy = std::sqrt(ss / (m - 1));
  }
  return result;
}

EvalReport benchmark_grid(const Dataset& data, const std::vector<Eigen::Index>& q_levels,
                          const std::vector<ClassifierConfig>& classifiers, const SplitSpec& spec,
                          int threads) {
  EvalReport report;
  for (Eigen::Index q : q_levels) {
    const Dataset truncated = truncate_features(data, q);
    for (const auto& config : classifiers) {
      const CvResult cv = run_cv(truncated, config, spec, threads);
      report.rows.push_back(EvalRow{std::string(to_string(config.kind)), q, cv.mean_accuracy,
                                    cv.std_accuracy, cv.train_seconds, cv.predict_seconds,
                                    spec.repetitions});
    }
  }
  return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  for (const auto& [key, value] : report.config) out << "# " << key << '=' << value << '\n';
  out << "classifier,q,mean_acc,std_acc,train_s,predict_s,reps\n";
  for (const auto& r : report.rows) {
    out << r.classifier << ',' << r.q << ',' << format_double17(r.mean_accuracy) << ','
        << format_double17(r.std_accuracy) << ',' << format_double17(r.train_seconds) << ','
        << format_double17(r.predict_seconds) << ',' << r.repetitions << '\n';
  }
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.config) config[key] = value;
  doc["config"] = config;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    doc["rows"].push_back({{"classifier", r.classifier},
                           {"q", r.q},
                           {"mean_acc", r.mean_accuracy},
                           {"std_acc", r.std_accuracy},
                           {"train_s", r.train_seconds},
                           {"predict_s", r.predict_seconds},
                           {"total_s", r.total_seconds()},
                           {"reps", r.repetitions}});
  }
  return doc.dump(2) + "\n";
}

void write_accuracy_plot_data(std::ostream& out, const EvalReport& report) {
  out << "classifier,q,mean_acc,std_acc\n";
  for (const auto& r : report.rows) {
    out << r.classifier << ',' << r.q << ',' << format_double17(r.mean_accuracy) << ','
        << format_double17(r.std_accuracy) << '\n';
  }
}

void write_timing_plot_data(std::ostream& out, const EvalReport& report) {
  out << "classifier,q,total_s\n";
  for (const auto& r : report.rows) {
    out << r.classifier << ',' << r.q << ',' << format_double17(r.total_seconds()) << '\n';
  }
}

}  // namespace accent
