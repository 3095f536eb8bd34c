#include "accent/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "accent/error.hpp"
#include "accent/text.hpp"

namespace accent {
namespace {

constexpr double kTau = 1e-12;  // curvature floor for non-PSD kernels
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& x, const KernelSpec& kernel) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = kernel_eval(kernel, x.row(i), x.row(j));
      k(j, i) = k(i, j);
    }
  }
  return k;
}

}  // namespace

SvmSolution svm_solve(const Dataset& data, const KernelSpec& kernel, const SvmOptions& options) {
  validate_training_set(data);
  validate(kernel);
  if (data.num_classes() != 2) throw InvalidArgument("SVM training needs exactly two classes");
  if (!(options.C > 0.0 && std::isfinite(options.C))) throw InvalidArgument("C must be positive");
  if (!(options.tol > 0.0)) throw InvalidArgument("tol must be positive");

  const Eigen::Index n = data.size();
  const double c = options.C;
  const std::int64_t cap = options.max_iterations > 0
                               ? options.max_iterations
                               : std::max<std::int64_t>(10'000'000, 100 * static_cast<std::int64_t>(n));

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = 2.0 * data.labels[static_cast<std::size_t>(i)] - 1.0;

  const Eigen::MatrixXd k = gram_matrix(data.points, kernel);
  // Q(i, j) = y_i y_j K(i, j); gradient of the dual objective a'Qa/2 - e'a.
  const Eigen::MatrixXd q = y.asDiagonal() * k * y.asDiagonal();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  auto in_up = [&](Eigen::Index t) { return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](Eigen::Index t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c); };

  // The incremental gradient update drifts when kernel values are large, so
  // the gradient is rebuilt exactly every `refresh_every` steps and before
  // convergence is accepted.
  const std::int64_t refresh_every = std::max<std::int64_t>(1000, 10 * static_cast<std::int64_t>(n));
  std::int64_t since_refresh = 0;
  auto refresh = [&] {
    grad.noalias() = q * alpha;
    grad.array() -= 1.0;
    since_refresh = 0;
  };

  SvmSolution sol;
  std::int64_t iter = 0;
  double gap = kInf;
  while (true) {
    if (since_refresh >= refresh_every) refresh();
    // First index: largest -y_t G_t over the "up" set.
    double gmax = -kInf;
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    }
    // Second index: best second-order gain among violating "low" members.
    double gmax2 = -kInf;
    double best_gain = kInf;
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = y[t] * grad[t];
      gmax2 = std::max(gmax2, v);
      if (i < 0) continue;
      const double b = gmax + v;
      if (b > 0.0) {
        double a = k(i, i) + k(t, t) - 2.0 * k(i, t);
        if (a <= 0.0) a = kTau;
        const double gain = -(b * b) / a;
        if (gain < best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }
    gap = gmax + gmax2;
    if (i < 0 || j < 0 || gap <= options.tol) {
      if (since_refresh == 0) break;
      refresh();
      continue;
    }
    if (iter >= cap) {
      throw NumericError("SMO did not converge in " + std::to_string(cap) +
                         " iterations; worst KKT violation (pair gap) " + format_double(gap) +
                         " exceeds tol " + format_double(options.tol));
    }
    ++iter;

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = k(i, i) + k(j, j) + 2.0 * k(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    alpha[i] = std::clamp(alpha[i], 0.0, c);
    alpha[j] = std::clamp(alpha[j], 0.0, c);

    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    grad.noalias() += q.col(i) * di + q.col(j) * dj;
    ++since_refresh;
  }

  // Bias from free multipliers; y_i - g(x_i) = -y_i G_i.
  double free_sum = 0.0;
  Eigen::Index free_count = 0;
  double upper = kInf;
  double lower = -kInf;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double v = -y[t] * grad[t];
    if (alpha[t] > 0.0 && alpha[t] < c) {
      free_sum += v;
      ++free_count;
    }
    if (in_up(t)) lower = std::max(lower, v);
    if (in_low(t)) upper = std::min(upper, v);
  }
  if (free_count > 0) {
    sol.bias = free_sum / static_cast<double>(free_count);
  } else if (std::isfinite(lower) && std::isfinite(upper)) {
    sol.bias = 0.5 * (lower + upper);
  } else {
    sol.bias = std::isfinite(lower) ? lower : std::isfinite(upper) ? upper : 0.0;
  }
  sol.alphas = std::move(alpha);
  sol.y = std::move(y);
  sol.iterations = iter;
  sol.final_gap = gap;
  return sol;
}

SvmModel svm_train(const Dataset& data, const KernelSpec& kernel, const SvmOptions& options) {
  const SvmSolution sol = svm_solve(data, kernel, options);
  const auto n_sv = (sol.alphas.array() > 0.0).count();
  SvmModel model;
  model.kernel = kernel;
  model.C = options.C;
  model.bias = sol.bias;
  model.iterations = sol.iterations;
  model.support_vectors.resize(n_sv, data.dim());
  model.support_labels.resize(n_sv);
  model.alphas.resize(n_sv);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (sol.alphas[i] > 0.0) {
      model.support_vectors.row(r) = data.points.row(i);
      model.support_labels[r] = sol.y[i];
      model.alphas[r] = sol.alphas[i];
      ++r;
    }
  }
  return model;
}

double svm_decision(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.dim()) {
    throw DimensionError("query has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(model.dim()));
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < model.support_vectors.rows(); ++i) {
    sum += model.alphas[i] * model.support_labels[i] *
           kernel_eval(model.kernel, model.support_vectors.row(i), x.transpose());
  }
  return sum + model.bias;
}

int svm_predict(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return svm_decision(model, x) > 0.0 ? 1 : 0;
}

}  // namespace accent
