#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "accent/discriminant.hpp"
#include "accent/features.hpp"
#include "accent/knn.hpp"
#include "accent/svm.hpp"

namespace accent {

enum class ClassifierKind { kLda, kQda, kSvmRbf, kSvmPoly, kKnn };

/// "lda", "qda", "svm-rbf", "svm-poly", "knn".
std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier(std::string_view name);

/// Hyperparameters for every classifier family; each family reads only its own.
struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::kKnn;
  // svm
  double C = 1.0;
  std::optional<double> gamma;  // unset = 1 / p at training time
  bool gamma_scale = false;     // with gamma unset: 1 / (p * variance of all training entries)
  int degree = 2;
  double coef0 = 1.0;
  double tol = 1e-3;
  std::int64_t max_iterations = 0;
  // knn
  int k = 3;
  Metric metric = Metric::kEuclidean;
  // lda / qda; unset = 1e-6 * trace / p per covariance
  std::optional<double> ridge;
};

/// Throws InvalidArgument for C, tol or an explicit gamma that is not
/// positive and finite, degree < 1, k < 1, max_iterations < 0 or a negative
/// ridge.
void validate(const ClassifierConfig& config);

/// Flat key=value lines (classifier, C, gamma, degree, coef0, tol,
/// max_iterations, k, metric, ridge); `auto` and `scale` mark values resolved
/// at training.
std::string to_key_value(const ClassifierConfig& config);
/// Applies one setting and revalidates the config.
void apply_key_value(ClassifierConfig& config, const std::string& key, const std::string& value);

using TrainedModel = std::variant<LdaModel, QdaModel, SvmModel, KnnModel>;

/// RBF width used for `data`: explicit gamma, else the scale rule, else 1 / p.
double resolve_gamma(const ClassifierConfig& config, const Dataset& data);

TrainedModel train_classifier(const ClassifierConfig& config, const Dataset& data);

int predict(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
std::vector<int> predict_all(const TrainedModel& model, const Eigen::MatrixXd& points);

Eigen::Index model_dimension(const TrainedModel& model);
std::string_view model_kind(const TrainedModel& model);

/// Text serialization: a `accent-model` line, `key=value` scalars, and
/// `matrix <name> <rows> <cols>` blocks of whitespace-separated values at 17
/// significant digits. `metadata` is echoed as `# key=value` comment lines.
void write_model(std::ostream& out, const TrainedModel& model,
                 const std::vector<std::pair<std::string, std::string>>& metadata = {});
TrainedModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const TrainedModel& model,
                const std::vector<std::pair<std::string, std::string>>& metadata = {});
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace accent
