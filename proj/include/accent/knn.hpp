#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <string_view>

#include "accent/error.hpp"
#include "accent/features.hpp"

namespace accent {

enum class Metric { kEuclidean, kManhattan };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar knn_distance(Metric metric, const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw DimensionError("distance arguments have lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  const auto diff = a.derived().array() - b.derived().array();
  if (metric == Metric::kManhattan) return diff.abs().sum();
  return std::sqrt(diff.square().sum());
}

/// Stored training set; there is no fitting beyond a copy.
struct KnnModel {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> stored_points;  // n x p
  std::vector<int> stored_labels;
  int k = 3;
  Metric metric = Metric::kEuclidean;

  Eigen::Index dim() const { return stored_points.cols(); }
};

/// Requires 1 <= k <= n, and odd k for two-class data.
KnnModel knn_fit(const Dataset& data, int k, Metric metric = Metric::kEuclidean);

/// Majority label among the k nearest stored points. Euclidean neighbours are
/// ranked by |y|^2 - 2 x.y (same order as the distance up to rounding).
/// Ties at the k-th rank go to the lower stored index; vote ties go to the smaller summed
/// neighbour distance, then to the smaller label.
int knn_predict(const KnnModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// knn_predict for every row of `queries`.
std::vector<int> knn_predict_all(const KnnModel& model, const Eigen::MatrixXd& queries);

}  // namespace accent
