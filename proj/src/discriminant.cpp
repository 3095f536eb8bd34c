#include "accent/discriminant.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "accent/error.hpp"
#include "accent/text.hpp"

namespace accent {
namespace {

struct Inverse {
  Eigen::MatrixXd inverse;
  double log_det = 0.0;
};

Inverse invert_spd(const Eigen::MatrixXd& cov, const char* what) {
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
    bool ok = (diag.array() > 0.0).all() && diag.allFinite();
    if (ok) {
      Inverse out;
      out.inverse = llt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
      out.log_det = 2.0 * diag.array().log().sum();
      if (out.inverse.allFinite() && std::isfinite(out.log_det)) return out;
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd values = eig.eigenvalues();
  const double scale = std::max(values.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double cutoff = scale * static_cast<double>(cov.rows()) * std::numeric_limits<double>::epsilon();
  const auto deficient = (values.array() <= cutoff).count();
  throw NumericError(std::string(what) + " is singular: " + std::to_string(deficient) + " of " +
                     std::to_string(cov.rows()) +
                     " dimensions are deficient after regularization; increase the ridge");
}

void check_class_sizes(const Dataset& data) {
  validate_training_set(data);
  const auto counts = data.class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < 2) {
      throw InvalidArgument("class " + std::to_string(k) + " has " + std::to_string(counts[k]) +
                            " point(s); discriminant analysis needs at least 2 per class");
    }
  }
}

Eigen::MatrixXd class_means(const Dataset& data, const std::vector<Eigen::Index>& counts) {
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(counts.size()), data.dim());
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    means.row(data.labels[static_cast<std::size_t>(i)]) += data.points.row(i);
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    means.row(static_cast<Eigen::Index>(k)) /= static_cast<double>(counts[k]);
  }
  return means;
}

Eigen::VectorXd log_priors(const std::vector<Eigen::Index>& counts, Eigen::Index n) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = std::log(static_cast<double>(counts[k]) / static_cast<double>(n));
  }
  return out;
}

void check_ridge(double ridge) {
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw InvalidArgument("ridge must be finite and nonnegative");
}

void check_priors(const Eigen::VectorXd& priors, Eigen::Index classes) {
  if (priors.size() != classes) throw DimensionError("prior count does not match class count");
  if ((priors.array() <= 0.0).any() || std::abs(priors.sum() - 1.0) > 1e-12) {
    throw InvalidArgument("priors must be positive and sum to 1");
  }
}

}  // namespace

double default_ridge(const Eigen::MatrixXd& cov) {
  const double p = static_cast<double>(std::max<Eigen::Index>(cov.rows(), 1));
  return std::max(1e-6 * cov.trace() / p, 1e-10);
}

LdaModel lda_train(const Dataset& data, std::optional<double> ridge) {
  check_class_sizes(data);
  const auto counts = data.class_counts();
  const auto n_classes = static_cast<Eigen::Index>(counts.size());
  LdaModel model;
  model.class_means = class_means(data, counts);
  model.log_priors = log_priors(counts, data.size());

  const Eigen::Index p = data.dim();
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Eigen::RowVectorXd d =
        data.points.row(i) - model.class_means.row(data.labels[static_cast<std::size_t>(i)]);
    scatter.noalias() += d.transpose() * d;
  }
  const double denom = static_cast<double>(data.size() - n_classes);
  if (denom <= 0.0) throw InvalidArgument("LDA needs more points than classes");
  Eigen::MatrixXd pooled = scatter / denom;
  model.ridge = ridge.value_or(default_ridge(pooled));
  check_ridge(model.ridge);
  pooled.diagonal().array() += model.ridge;
  model.pooled_cov_inverse = invert_spd(pooled, "pooled covariance").inverse;
  return model;
}

QdaModel qda_train(const Dataset& data, std::optional<double> ridge) {
  check_class_sizes(data);
  const auto counts = data.class_counts();
  const auto n_classes = static_cast<Eigen::Index>(counts.size());
  const Eigen::Index p = data.dim();

  QdaModel model;
  model.class_means = class_means(data, counts);
  model.log_priors = log_priors(counts, data.size());
  model.log_dets.resize(n_classes);

  std::vector<Eigen::MatrixXd> scatter(counts.size(), Eigen::MatrixXd::Zero(p, p));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const int k = data.labels[static_cast<std::size_t>(i)];
    const Eigen::RowVectorXd d = data.points.row(i) - model.class_means.row(k);
    scatter[static_cast<std::size_t>(k)].noalias() += d.transpose() * d;
  }
  for (Eigen::Index k = 0; k < n_classes; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    Eigen::MatrixXd cov = scatter[ku] / static_cast<double>(counts[ku] - 1);
    const double r = ridge.value_or(default_ridge(cov));
    check_ridge(r);
    cov.diagonal().array() += r;
    auto inv = invert_spd(cov, ("covariance of class " + std::to_string(k)).c_str());
    model.cov_inverses.push_back(std::move(inv.inverse));
    model.log_dets[k] = inv.log_det;
    model.ridges.push_back(r);
  }
  return model;
}

LdaModel lda_from_parameters(const Eigen::MatrixXd& means, const Eigen::MatrixXd& covariance,
                             const Eigen::VectorXd& priors) {
  if (covariance.rows() != means.cols() || covariance.cols() != means.cols()) {
    throw DimensionError("covariance shape does not match mean width");
  }
  check_priors(priors, means.rows());
  LdaModel model;
  model.class_means = means;
  model.pooled_cov_inverse = invert_spd(covariance, "covariance").inverse;
  model.log_priors = priors.array().log().matrix();
  return model;
}

QdaModel qda_from_parameters(const Eigen::MatrixXd& means,
                             const std::vector<Eigen::MatrixXd>& covariances,
                             const Eigen::VectorXd& priors) {
  if (static_cast<Eigen::Index>(covariances.size()) != means.rows()) {
    throw DimensionError("need one covariance per class");
  }
  check_priors(priors, means.rows());
  QdaModel model;
  model.class_means = means;
  model.log_priors = priors.array().log().matrix();
  model.log_dets.resize(means.rows());
  for (std::size_t k = 0; k < covariances.size(); ++k) {
    const auto& cov = covariances[k];
    if (cov.rows() != means.cols() || cov.cols() != means.cols()) {
      throw DimensionError("covariance shape does not match mean width");
    }
    auto inv = invert_spd(cov, "covariance");
    model.cov_inverses.push_back(std::move(inv.inverse));
    model.log_dets[static_cast<Eigen::Index>(k)] = inv.log_det;
    model.ridges.push_back(0.0);
  }
  return model;
}

Eigen::VectorXd lda_score(const LdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.class_means.cols()) {
    throw DimensionError("query has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(model.class_means.cols()));
  }
  const Eigen::Index s = model.class_means.rows();
  Eigen::VectorXd scores(s);
  for (Eigen::Index k = 0; k < s; ++k) {
    const Eigen::VectorXd w = model.pooled_cov_inverse * model.class_means.row(k).transpose();
    scores[k] = x.dot(w) - 0.5 * model.class_means.row(k).dot(w) + model.log_priors[k];
  }
  return scores;
}

Eigen::VectorXd qda_score(const QdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.class_means.cols()) {
    throw DimensionError("query has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(model.class_means.cols()));
  }
  const Eigen::Index s = model.class_means.rows();
  Eigen::VectorXd scores(s);
  for (Eigen::Index k = 0; k < s; ++k) {
    const Eigen::VectorXd d = x - model.class_means.row(k).transpose();
    const double mahalanobis = d.dot(model.cov_inverses[static_cast<std::size_t>(k)] * d);
    scores[k] = -0.5 * model.log_dets[k] - 0.5 * mahalanobis + model.log_priors[k];
  }
  return scores;
}

int discriminant_predict(const Eigen::Ref<const Eigen::VectorXd>& scores) {
  if (scores.size() == 0) throw InvalidArgument("no scores to compare");
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return static_cast<int>(best);
}

}  // namespace accent
