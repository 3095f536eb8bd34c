#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "accent/features.hpp"

namespace accent {

/// Shared-covariance Gaussian classifier. Scores are
/// delta_k(x) = x' inv(S) mu_k - mu_k' inv(S) mu_k / 2 + log(pi_k).
struct LdaModel {
  Eigen::MatrixXd class_means;         // S x p
  Eigen::MatrixXd pooled_cov_inverse;  // p x p
  Eigen::VectorXd log_priors;          // S
  double ridge = 0.0;                  // added to the covariance diagonal before inversion
};

/// Per-class covariance Gaussian classifier. Scores are
/// delta_k(x) = -log|S_k| / 2 - (x - mu_k)' inv(S_k) (x - mu_k) / 2 + log(pi_k).
struct QdaModel {
  Eigen::MatrixXd class_means;               // S x p
  std::vector<Eigen::MatrixXd> cov_inverses;  // S of p x p
  Eigen::VectorXd log_dets;                  // S
  Eigen::VectorXd log_priors;                // S
  std::vector<double> ridges;                // per class
};

/// 1e-6 * trace(cov) / p, floored at 1e-10 so an all-zero covariance stays
/// invertible.
double default_ridge(const Eigen::MatrixXd& cov);

/// Sample mean per class and pooled within-class covariance with denominator
/// n - S. `ridge` defaults to default_ridge(pooled covariance).
LdaModel lda_train(const Dataset& data, std::optional<double> ridge = std::nullopt);

/// Per-class sample covariance with denominator n_k - 1, each regularized with
/// its own ridge (default_ridge of that class unless given).
QdaModel qda_train(const Dataset& data, std::optional<double> ridge = std::nullopt);

/// Builds a model from known parameters; `priors` must be positive and sum to 1.
LdaModel lda_from_parameters(const Eigen::MatrixXd& means, const Eigen::MatrixXd& covariance,
                             const Eigen::VectorXd& priors);
QdaModel qda_from_parameters(const Eigen::MatrixXd& means,
                             const std::vector<Eigen::MatrixXd>& covariances,
                             const Eigen::VectorXd& priors);

Eigen::VectorXd lda_score(const LdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd qda_score(const QdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Index of the largest score; ties go to the smallest index.
int discriminant_predict(const Eigen::Ref<const Eigen::VectorXd>& scores);

}  // namespace accent
