#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "exset/errors.hpp"
#include "exset/linalg.hpp"

namespace exset {

/// Negated Branin-Hoo function on the unit square. The standard constants
/// and the rescaling x1 -> 15 u1 - 5, x2 -> 15 u2 follow Jones, Schonlau &
/// Welch (1998); the three global maxima have value -0.397887.
inline double branin_neg(const Eigen::Ref<const Vector>& u) {
  if (u.size() != 2) throw DimensionError("branin_neg: need a 2-d point");
  constexpr double pi = 3.14159265358979323846;
  const double x1 = 15.0 * u[0] - 5.0;
  const double x2 = 15.0 * u[1];
  const double b = 5.1 / (4.0 * pi * pi);
  const double c = 5.0 / pi;
  const double s = 10.0;
  const double t = 1.0 / (8.0 * pi);
  const double q = x2 - b * x1 * x1 + c * x1 - 6.0;
  return -(q * q + s * (1.0 - t) * std::cos(x1) + s);
}

namespace detail {

inline constexpr double kHartmannAlpha[4] = {1.0, 1.2, 3.0, 3.2};
inline constexpr double kHartmannA[4][6] = {
    {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
    {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
    {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
    {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
};
inline constexpr double kHartmannP[4][6] = {
    {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
    {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
    {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
    {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
};

}  // namespace detail

/// Classic six-dimensional Hartmann function (negative on (0,1)^6, global
/// minimum -3.32237), standard constants from Jones, Schonlau & Welch (1998).
inline double hartmann6(const Eigen::Ref<const Vector>& x) {
  if (x.size() != 6) throw DimensionError("hartmann6: need a 6-d point");
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double dj = x[j] - detail::kHartmannP[i][j];
      inner += detail::kHartmannA[i][j] * dj * dj;
    }
    sum += detail::kHartmannAlpha[i] * std::exp(-inner);
  }
  return -sum;
}

/// -log(-Hartmann6(x)). Defined wherever Hartmann6 < 0, which holds on the
/// whole open unit cube with the standard constants.
inline double hartmann6_log(const Eigen::Ref<const Vector>& x) {
  const double h = hartmann6(x);
  if (!(h < 0.0)) throw NumericError("hartmann6_log: Hartmann6 >= 0 at the given point");
  return -std::log(-h);
}

/// Named benchmark: objective plus the experiment defaults that go with it.
struct Benchmark {
  std::string name;
  int dim = 0;
  double threshold = 0.0;  // excursion level, direction "above"
  int default_n_obs = 0;
  std::function<double(const Eigen::Ref<const Vector>&)> eval;
};

inline Benchmark benchmark_by_name(const std::string& name) {
  if (name == "branin-neg") {
    return {"branin-neg", 2, -10.0, 20, [](const Eigen::Ref<const Vector>& x) {
              return branin_neg(x);
            }};
  }
  if (name == "hartmann6-log") {
    return {"hartmann6-log", 6, 6.0, 60, [](const Eigen::Ref<const Vector>& x) {
              return hartmann6_log(x);
            }};
  }
  throw ConfigError("unknown benchmark: " + name);
}

}  // namespace exset
