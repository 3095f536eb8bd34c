#include "accent/model.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "accent/error.hpp"
#include "accent/text.hpp"
#include "accent/version.hpp"

namespace accent {

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kLda: return "lda";
    case ClassifierKind::kQda: return "qda";
    case ClassifierKind::kSvmRbf: return "svm-rbf";
    case ClassifierKind::kSvmPoly: return "svm-poly";
    case ClassifierKind::kKnn: return "knn";
  }
  return "unknown";
}

ClassifierKind parse_classifier(std::string_view name) {
  for (auto kind : {ClassifierKind::kLda, ClassifierKind::kQda, ClassifierKind::kSvmRbf,
                    ClassifierKind::kSvmPoly, ClassifierKind::kKnn}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown classifier '" + std::string(name) +
                        "' (expected lda, qda, svm-rbf, svm-poly or knn)");
}

std::string to_key_value(const ClassifierConfig& c) {
  std::ostringstream out;
  out << "classifier=" << to_string(c.kind) << '\n'
      << "C=" << format_double(c.C) << '\n'
      << "gamma=" << (c.gamma ? format_double(*c.gamma) : std::string(c.gamma_scale ? "scale" : "auto")) << '\n'
      << "degree=" << c.degree << '\n'
      << "coef0=" << format_double(c.coef0) << '\n'
      << "tol=" << format_double(c.tol) << '\n'
      << "max_iterations=" << c.max_iterations << '\n'
      << "k=" << c.k << '\n'
      << "metric=" << to_string(c.metric) << '\n'
      << "ridge=" << (c.ridge ? format_double(*c.ridge) : std::string("auto")) << '\n';
  return out.str();
}

void validate(const ClassifierConfig& c) {
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(c.C)) throw InvalidArgument("C must be positive and finite");
  if (!positive(c.tol)) throw InvalidArgument("tol must be positive and finite");
  if (c.gamma && !positive(*c.gamma)) throw InvalidArgument("gamma must be positive and finite");
  if (c.degree < 1) throw InvalidArgument("degree must be at least 1");
  if (!std::isfinite(c.coef0)) throw InvalidArgument("coef0 must be finite");
  if (c.k < 1) throw InvalidArgument("k must be at least 1");
  if (c.max_iterations < 0) throw InvalidArgument("max_iterations must be nonnegative");
  if (c.ridge && !(*c.ridge >= 0.0 && std::isfinite(*c.ridge))) {
    throw InvalidArgument("ridge must be finite and nonnegative");
  }
}

void apply_key_value(ClassifierConfig& c, const std::string& key, const std::string& value) {
  if (key == "classifier") {
    c.kind = parse_classifier(value);
  } else if (key == "C") {
    c.C = parse_double(value, key);
  } else if (key == "gamma") {
    c.gamma_scale = value == "scale";
    c.gamma = value == "auto" || value == "scale" ? std::nullopt : std::optional<double>(parse_double(value, key));
  } else if (key == "degree") {
    c.degree = parse_int(value, key);
  } else if (key == "coef0") {
    c.coef0 = parse_double(value, key);
  } else if (key == "tol") {
    c.tol = parse_double(value, key);
  } else if (key == "max_iterations") {
    c.max_iterations = static_cast<std::int64_t>(parse_double(value, key));
  } else if (key == "k") {
    c.k = parse_int(value, key);
  } else if (key == "metric") {
    c.metric = parse_metric(value);
  } else if (key == "ridge") {
    c.ridge = value == "auto" ? std::nullopt : std::optional<double>(parse_double(value, key));
  } else {
    throw InvalidArgument("unknown classifier setting '" + key + "'");
  }
  validate(c);
}

double resolve_gamma(const ClassifierConfig& c, const Dataset& data) {
  if (c.gamma) return *c.gamma;
  const auto p = static_cast<double>(data.dim());
  if (c.gamma_scale && data.points.size() > 0) {
    const double mean = data.points.mean();
    const double var = (data.points.array() - mean).square().mean();
    if (var > 0.0) return 1.0 / (p * var);
  }
  return 1.0 / p;
}

TrainedModel train_classifier(const ClassifierConfig& c, const Dataset& data) {
  validate(c);
  switch (c.kind) {
    case ClassifierKind::kLda:
      return lda_train(data, c.ridge);
    case ClassifierKind::kQda:
      return qda_train(data, c.ridge);
    case ClassifierKind::kSvmRbf:
    case ClassifierKind::kSvmPoly: {
      KernelSpec kernel = c.kind == ClassifierKind::kSvmRbf
                              ? KernelSpec::rbf(resolve_gamma(c, data))
                              : KernelSpec::polynomial(c.degree, c.coef0);
      return svm_train(data, kernel, SvmOptions{c.C, c.tol, c.max_iterations});
    }
    case ClassifierKind::kKnn:
      return knn_fit(data, c.k, c.metric);
  }
  throw InvalidArgument("unknown classifier kind");
}

int predict(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::visit(
      [&](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LdaModel>) return discriminant_predict(lda_score(m, x));
        else if constexpr (std::is_same_v<T, QdaModel>) return discriminant_predict(qda_score(m, x));
        else if constexpr (std::is_same_v<T, SvmModel>) return svm_predict(m, x);
        else return knn_predict(m, x);
      },
      model);
}

std::vector<int> predict_all(const TrainedModel& model, const Eigen::MatrixXd& points) {
  if (const auto* knn = std::get_if<KnnModel>(&model)) return knn_predict_all(*knn, points);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) out.push_back(predict(model, points.row(i).transpose()));
  return out;
}

Eigen::Index model_dimension(const TrainedModel& model) {
  return std::visit(
      [](const auto& m) -> Eigen::Index {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LdaModel> || std::is_same_v<T, QdaModel>) return m.class_means.cols();
        else return m.dim();
      },
      model);
}

std::string_view model_kind(const TrainedModel& model) {
  return std::visit(
      [](const auto& m) -> std::string_view {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LdaModel>) return "lda";
        else if constexpr (std::is_same_v<T, QdaModel>) return "qda";
        else if constexpr (std::is_same_v<T, SvmModel>) return "svm";
        else return "knn";
      },
      model);
}

// ---------------------------------------------------------------------------
// Text format

namespace {

constexpr const char* kMagic = "accent-model";

struct Document {
  std::map<std::string, std::string> scalars;
  std::map<std::string, Eigen::MatrixXd> matrices;

  const std::string& scalar(const std::string& key) const {
    const auto it = scalars.find(key);
    if (it == scalars.end()) throw FormatError("model file lacks '" + key + "'");
    return it->second;
  }
  const Eigen::MatrixXd& matrix(const std::string& key) const {
    const auto it = matrices.find(key);
    if (it == matrices.end()) throw FormatError("model file lacks matrix '" + key + "'");
    return it->second;
  }
};

void put_matrix(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double17(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd as_row(const Eigen::VectorXd& v) { return v.transpose(); }

Eigen::VectorXd as_vector(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != 1) throw FormatError(std::string("matrix '") + name + "' must have one row");
  return m.row(0).transpose();
}

Eigen::MatrixXd label_row(const std::vector<int>& labels) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = labels[i];
  return m;
}

Document parse_document(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kMagic) {
    throw FormatError("not an accent model file (missing '" + std::string(kMagic) + "' line)");
  }
  Document doc;
  while (std::getline(in, line)) {
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (body.rfind("matrix ", 0) == 0) {
      std::istringstream header{std::string(body.substr(7))};
      std::string name;
      Eigen::Index rows = -1;
      Eigen::Index cols = -1;
      if (!(header >> name >> rows >> cols) || rows < 0 || cols < 0) {
        throw FormatError("malformed matrix header '" + std::string(body) + "'");
      }
      Eigen::MatrixXd m(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw FormatError("matrix '" + name + "' is truncated");
        const auto fields = split(trim(line), ' ');
        if (cols > 0 && static_cast<Eigen::Index>(fields.size()) != cols) {
          throw FormatError("matrix '" + name + "' row " + std::to_string(r) + " has wrong width");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
          m(r, c) = parse_double(fields[static_cast<std::size_t>(c)], name);
        }
      }
      doc.matrices[name] = std::move(m);
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw FormatError("unexpected model line '" + std::string(body) + "'");
    doc.scalars[std::string(body.substr(0, eq))] = std::string(body.substr(eq + 1));
  }
  return doc;
}

std::vector<int> labels_from(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd v = as_vector(m, "labels");
  std::vector<int> out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(static_cast<int>(v[i]));
  return out;
}

}  // namespace

void write_model(std::ostream& out, const TrainedModel& model,
                 const std::vector<std::pair<std::string, std::string>>& metadata) {
  out << kMagic << '\n' << "version=" << kModelFormatVersion << '\n';
  for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
  out << "kind=" << model_kind(model) << '\n' << "dim=" << model_dimension(model) << '\n';
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LdaModel>) {
          out << "ridge=" << format_double17(m.ridge) << '\n';
          put_matrix(out, "class_means", m.class_means);
          put_matrix(out, "pooled_cov_inverse", m.pooled_cov_inverse);
          put_matrix(out, "log_priors", as_row(m.log_priors));
        } else if constexpr (std::is_same_v<T, QdaModel>) {
          out << "classes=" << m.class_means.rows() << '\n';
          put_matrix(out, "class_means", m.class_means);
          for (std::size_t k = 0; k < m.cov_inverses.size(); ++k) {
            put_matrix(out, "cov_inverse_" + std::to_string(k), m.cov_inverses[k]);
          }
          put_matrix(out, "log_dets", as_row(m.log_dets));
          put_matrix(out, "log_priors", as_row(m.log_priors));
          put_matrix(out, "ridges",
                     as_row(Eigen::Map<const Eigen::VectorXd>(m.ridges.data(),
                                                              static_cast<Eigen::Index>(m.ridges.size()))));
        } else if constexpr (std::is_same_v<T, SvmModel>) {
          out << "kernel=" << (m.kernel.kind == KernelKind::kRbf ? "rbf" : "polynomial") << '\n'
              << "gamma=" << format_double17(m.kernel.gamma) << '\n'
              << "degree=" << m.kernel.degree << '\n'
              << "coef0=" << format_double17(m.kernel.coef0) << '\n'
              << "C=" << format_double17(m.C) << '\n'
              << "bias=" << format_double17(m.bias) << '\n'
              << "iterations=" << m.iterations << '\n';
          put_matrix(out, "support_vectors", m.support_vectors);
          put_matrix(out, "support_labels", as_row(m.support_labels));
          put_matrix(out, "alphas", as_row(m.alphas));
        } else {
          out << "k=" << m.k << '\n' << "metric=" << to_string(m.metric) << '\n';
          put_matrix(out, "stored_points", m.stored_points);
          put_matrix(out, "stored_labels", label_row(m.stored_labels));
        }
      },
      model);
}

TrainedModel read_model(std::istream& in) {
  const Document doc = parse_document(in);
  const std::string& version = doc.scalar("version");
  if (version != std::to_string(kModelFormatVersion)) {
    throw FormatError("unknown model version '" + version + "' (this build reads version " +
                      std::to_string(kModelFormatVersion) + ")");
  }
  const std::string& kind = doc.scalar("kind");
  const auto dim = static_cast<Eigen::Index>(parse_int(doc.scalar("dim"), "dim"));
  auto check_cols = [&](const Eigen::MatrixXd& m, const char* name) {
    if (m.cols() != dim) throw FormatError(std::string("matrix '") + name + "' width disagrees with dim");
  };

  if (kind == "lda") {
    LdaModel m;
    m.ridge = parse_double(doc.scalar("ridge"), "ridge");
    m.class_means = doc.matrix("class_means");
    m.pooled_cov_inverse = doc.matrix("pooled_cov_inverse");
    m.log_priors = as_vector(doc.matrix("log_priors"), "log_priors");
    check_cols(m.class_means, "class_means");
    check_cols(m.pooled_cov_inverse, "pooled_cov_inverse");
    return m;
  }
  if (kind == "qda") {
    QdaModel m;
    const int classes = parse_int(doc.scalar("classes"), "classes");
    m.class_means = doc.matrix("class_means");
    check_cols(m.class_means, "class_means");
    for (int k = 0; k < classes; ++k) {
      m.cov_inverses.push_back(doc.matrix("cov_inverse_" + std::to_string(k)));
      check_cols(m.cov_inverses.back(), "cov_inverse");
    }
    m.log_dets = as_vector(doc.matrix("log_dets"), "log_dets");
    m.log_priors = as_vector(doc.matrix("log_priors"), "log_priors");
    const Eigen::VectorXd ridges = as_vector(doc.matrix("ridges"), "ridges");
    m.ridges.assign(ridges.data(), ridges.data() + ridges.size());
    return m;
  }
  if (kind == "svm") {
    SvmModel m;
    const std::string& kernel = doc.scalar("kernel");
    if (kernel != "rbf" && kernel != "polynomial") throw FormatError("unknown kernel '" + kernel + "'");
    m.kernel.kind = kernel == "rbf" ? KernelKind::kRbf : KernelKind::kPolynomial;
    m.kernel.gamma = parse_double(doc.scalar("gamma"), "gamma");
    m.kernel.degree = parse_int(doc.scalar("degree"), "degree");
    m.kernel.coef0 = parse_double(doc.scalar("coef0"), "coef0");
    m.C = parse_double(doc.scalar("C"), "C");
    m.bias = parse_double(doc.scalar("bias"), "bias");
    m.iterations = static_cast<std::int64_t>(parse_double(doc.scalar("iterations"), "iterations"));
    m.support_vectors = doc.matrix("support_vectors");
    m.support_labels = as_vector(doc.matrix("support_labels"), "support_labels");
    m.alphas = as_vector(doc.matrix("alphas"), "alphas");
    check_cols(m.support_vectors, "support_vectors");
    return m;
  }
  if (kind == "knn") {
    KnnModel m;
    m.k = parse_int(doc.scalar("k"), "k");
    m.metric = parse_metric(doc.scalar("metric"));
    m.stored_points = doc.matrix("stored_points");
    m.stored_labels = labels_from(doc.matrix("stored_labels"));
    check_cols(m.stored_points, "stored_points");
    return m;
  }
  throw FormatError("unknown model kind '" + kind + "'");
}

void save_model(const std::filesystem::path& path, const TrainedModel& model,
                const std::vector<std::pair<std::string, std::string>>& metadata) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create '" + path.string() + "'");
  write_model(out, model, metadata);
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_model(in);
}

}  // namespace accent
