#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "accent/features.hpp"
#include "accent/kernels.hpp"

namespace accent {

struct SvmOptions {
  double C = 1.0;
  double tol = 1e-3;
  /// 0 selects max(10'000'000, 100 n).
  std::int64_t max_iterations = 0;
};

/// Binary soft-margin SVM with decision sign(sum_i a_i y_i K(x_i, x) + b).
/// Only points with a_i > 0 are kept. Labels are +/-1 (label 1 -> +1).
struct SvmModel {
  Eigen::MatrixXd support_vectors;  // n_sv x p
  Eigen::VectorXd support_labels;   // +/-1
  Eigen::VectorXd alphas;           // in (0, C]
  double bias = 0.0;
  KernelSpec kernel;
  double C = 1.0;
  std::int64_t iterations = 0;      // SMO steps used in training

  Eigen::Index dim() const { return support_vectors.cols(); }
};

/// Full dual solution, including zero multipliers, in training-point order.
struct SvmSolution {
  Eigen::VectorXd alphas;
  Eigen::VectorXd y;
  double bias = 0.0;
  std::int64_t iterations = 0;
  double final_gap = 0.0;  // max violating-pair gap at exit
};

/// Sequential minimal optimization on the dual with a precomputed Gram matrix.
/// Each step picks the maximal violating pair (first index by largest
/// violation, second by the largest second-order gain, ties to the lower
/// index), so training is deterministic. Stops once the pair gap is <= tol,
/// which bounds every KKT residual by tol. The bias is the mean of
/// y_i - g(x_i) over free multipliers (0 < a_i < C), or the midpoint of the
/// feasible interval when none are free. Throws NumericError, reporting the
/// remaining gap, if the iteration cap is hit.
SvmSolution svm_solve(const Dataset& data, const KernelSpec& kernel, const SvmOptions& options);

SvmModel svm_train(const Dataset& data, const KernelSpec& kernel, const SvmOptions& options = {});

/// sum_i a_i y_i K(sv_i, x) + b.
double svm_decision(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// 1 when the decision value is positive, else 0.
int svm_predict(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace accent
