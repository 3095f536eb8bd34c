#include "accent/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace accent {

std::string_view to_string(Metric metric) {
  return metric == Metric::kManhattan ? "manhattan" : "euclidean";
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::kEuclidean;
  if (name == "manhattan") return Metric::kManhattan;
  throw InvalidArgument("unknown metric '" + std::string(name) + "' (expected euclidean or manhattan)");
}

KnnModel knn_fit(const Dataset& data, int k, Metric metric) {
  validate_training_set(data);
  if (k < 1 || k > data.size()) {
    throw InvalidArgument("k = " + std::to_string(k) + " must lie in [1, " +
                          std::to_string(data.size()) + "]");
  }
  if (data.num_classes() == 2 && k % 2 == 0) {
    throw InvalidArgument("k must be odd for two-class data, got " + std::to_string(k));
  }
  return KnnModel{data.points, data.labels, k, metric};
}

namespace {

// Sorted top-k indices by `rank_key`; strict < keeps the lower index on ties.
std::vector<Eigen::Index> top_k(const Eigen::Ref<const Eigen::VectorXd>& rank_key, int k) {
  std::vector<Eigen::Index> best;
  best.reserve(static_cast<std::size_t>(k) + 1);
  double cutoff = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < rank_key.size(); ++i) {
    if (static_cast<int>(best.size()) == k && !(rank_key[i] < cutoff)) continue;
    auto pos = best.end();
    while (pos != best.begin() && rank_key[i] < rank_key[*(pos - 1)]) --pos;
    best.insert(pos, i);
    if (static_cast<int>(best.size()) > k) best.pop_back();
    if (static_cast<int>(best.size()) == k) cutoff = rank_key[best.back()];
  }
  return best;
}

int vote(const KnnModel& model, const std::vector<Eigen::Index>& neighbours,
         const Eigen::Ref<const Eigen::RowVectorXd>& x, int n_labels) {
  std::vector<int> votes(static_cast<std::size_t>(n_labels), 0);
  std::vector<double> spread(static_cast<std::size_t>(n_labels), 0.0);
  for (Eigen::Index i : neighbours) {
    const auto label = static_cast<std::size_t>(model.stored_labels[static_cast<std::size_t>(i)]);
    ++votes[label];
    spread[label] += knn_distance(model.metric, model.stored_points.row(i), x);
  }
  std::size_t winner = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[winner] ||
        (votes[c] == votes[winner] && votes[c] > 0 && spread[c] < spread[winner])) {
      winner = c;
    }
  }
  return static_cast<int>(winner);
}

void check_model(const KnnModel& model, Eigen::Index query_dim) {
  if (query_dim != model.dim()) {
    throw DimensionError("query has " + std::to_string(query_dim) + " features, model expects " +
                         std::to_string(model.dim()));
  }
  if (model.k < 1 || model.k > model.stored_points.rows()) {
    throw InvalidArgument("k exceeds the number of stored points");
  }
}

}  // namespace

std::vector<int> knn_predict_all(const KnnModel& model, const Eigen::MatrixXd& queries) {
  check_model(model, queries.cols());
  const int n_labels = *std::max_element(model.stored_labels.begin(), model.stored_labels.end()) + 1;
  const Eigen::Index n = model.stored_points.rows();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  if (model.metric == Metric::kManhattan) {
    Eigen::VectorXd key(n);
    for (Eigen::Index j = 0; j < queries.rows(); ++j) {
      key.noalias() = (model.stored_points.rowwise() - queries.row(j)).cwiseAbs().rowwise().sum();
      out.push_back(vote(model, top_k(key, model.k), queries.row(j), n_labels));
    }
    return out;
  }
  // Euclidean rank key |y|^2 - 2 x.y differs from |x - y|^2 by a per-query
  // constant, so one matrix product ranks every pair.
  const Eigen::VectorXd norms = model.stored_points.rowwise().squaredNorm();
  Eigen::MatrixXd keys = model.stored_points * queries.transpose();  // n x m
  keys = (-2.0 * keys).colwise() + norms;
  for (Eigen::Index j = 0; j < queries.rows(); ++j) {
    out.push_back(vote(model, top_k(keys.col(j), model.k), queries.row(j), n_labels));
  }
  return out;
}

int knn_predict(const KnnModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_model(model, x.size());
  return knn_predict_all(model, x.transpose())[0];
}

}  // namespace accent
