#pragma once

#include <cmath>
#include <string>

#include "exset/design.hpp"
#include "exset/errors.hpp"
#include "exset/linalg.hpp"

namespace exset {

enum class KernelFamily { Matern32, Matern52 };

inline std::string to_string(KernelFamily family) {
  return family == KernelFamily::Matern32 ? "matern32" : "matern52";
}

inline KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  throw ConfigError("unknown kernel family: " + name);
}

/// Stationary tensor-product Matern covariance: product over dimensions of
/// the 1-D correlation at |x_j - y_j| / theta_j, times the variance.
struct KernelSpec {
  KernelFamily family = KernelFamily::Matern52;
  double variance = 1.0;      // sigma^2 > 0
  Vector lengthscales;        // theta, all > 0

  int dim() const { return static_cast<int>(lengthscales.size()); }

  void validate() const {
    if (!(variance > 0.0)) throw DimensionError("kernel: variance must be > 0");
    if (lengthscales.size() == 0 || (lengthscales.array() <= 0.0).any()) {
      throw DimensionError("kernel: lengthscales must be > 0");
    }
  }
};

/// Constant prior mean. `known` selects simple kriging (the constant is
/// taken as given); otherwise the constant is profiled out generalized
/// least squares style, i.e. ordinary kriging.
struct MeanSpec {
  double constant = 0.0;
  bool known = false;
};

inline double matern32_corr(double h) {
  const double a = 1.7320508075688772935 * h;  // sqrt(3) h
  return (1.0 + a) * std::exp(-a);
}

inline double matern52_corr(double h) {
  const double a = 2.2360679774997896964 * h;  // sqrt(5) h
  return (1.0 + a + a * a / 3.0) * std::exp(-a);
}

inline double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                          const Eigen::Ref<const Vector>& y) {
  const int d = spec.dim();
  if (x.size() != d || y.size() != d) {
    throw DimensionError("kernel_eval: point dimension does not match lengthscales");
  }
  double corr = 1.0;
  if (spec.family == KernelFamily::Matern32) {
    for (int j = 0; j < d; ++j) {
      corr *= matern32_corr(std::abs(x[j] - y[j]) / spec.lengthscales[j]);
    }
  } else {
    for (int j = 0; j < d; ++j) {
      corr *= matern52_corr(std::abs(x[j] - y[j]) / spec.lengthscales[j]);
    }
  }
  return spec.variance * corr;
}

/// Cross-covariance matrix [k(a_i, b_j)]. Symmetric PSD when called with the
/// same design twice.
inline Matrix kernel_matrix(const KernelSpec& spec, const Design& a, const Design& b) {
  if (a.dim() != spec.dim() || b.dim() != spec.dim()) {
    throw DimensionError("kernel_matrix: design dimension does not match kernel");
  }
  Matrix out(a.size(), b.size());
  const bool same = &a == &b;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Eigen::Index jstart = same ? i : 0;
    for (Eigen::Index j = jstart; j < b.size(); ++j) {
      out(i, j) = kernel_eval(spec, a.points.row(i).transpose(), b.points.row(j).transpose());
      if (same && j != i) out(j, i) = out(i, j);
    }
  }
  return out;
}

inline Matrix kernel_matrix(const KernelSpec& spec, const Design& a) {
  return kernel_matrix(spec, a, a);
}

/// Covariances k(x, a_i) against every row of a design, as a vector.
inline Vector kernel_cross(const KernelSpec& spec, const Design& a,
                           const Eigen::Ref<const Vector>& x) {
  Vector out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out[i] = kernel_eval(spec, a.points.row(i).transpose(), x);
  }
  return out;
}

}  // namespace exset
