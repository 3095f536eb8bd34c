#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "accent/error.hpp"

namespace accent {

enum class KernelKind { kRbf, kPolynomial };

struct KernelSpec {
  KernelKind kind = KernelKind::kRbf;
  double gamma = 1.0;  // rbf width
  int degree = 2;      // polynomial degree
  double coef0 = 1.0;  // polynomial offset c

  static KernelSpec rbf(double gamma) { return {KernelKind::kRbf, gamma, 2, 1.0}; }
  static KernelSpec polynomial(int degree, double coef0) {
    return {KernelKind::kPolynomial, 1.0, degree, coef0};
  }
};

inline void validate(const KernelSpec& spec) {
  if (spec.kind == KernelKind::kRbf && !(spec.gamma > 0.0 && std::isfinite(spec.gamma))) {
    throw InvalidArgument("rbf gamma must be positive");
  }
  if (spec.kind == KernelKind::kPolynomial) {
    if (spec.degree < 1) throw InvalidArgument("polynomial degree must be at least 1");
    if (!std::isfinite(spec.coef0)) throw InvalidArgument("polynomial offset must be finite");
  }
}

/// exp(-gamma |a - b|^2) or (a . b + c)^d.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar kernel_eval(const KernelSpec& spec, const Eigen::MatrixBase<DerivedA>& a,
                                      const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) {
    throw DimensionError("kernel arguments have lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  if (spec.kind == KernelKind::kRbf) {
    return std::exp(-Scalar(spec.gamma) * (a.derived().array() - b.derived().array()).square().sum());
  }
  const Scalar base = (a.derived().array() * b.derived().array()).sum() + Scalar(spec.coef0);
  Scalar out(1);
  for (int i = 0; i < spec.degree; ++i) out *= base;
  return out;
}

}  // namespace accent
