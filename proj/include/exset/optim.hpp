#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "exset/linalg.hpp"

namespace exset {

/// Box-constrained quasi-Newton minimizer with numerical gradients.
///
/// BFGS on the inverse Hessian with an Armijo backtracking line search;
/// iterates are projected onto the box. Gradients are central differences
/// with step `grad_step` (one-sided at an active bound). Good enough for the
/// smooth low-dimensional objectives used here; not a general NLP solver.
struct BoxOptimOptions {
  int max_iters = 60;
  int max_evals = std::numeric_limits<int>::max();
  double grad_step = 1e-5;
  double x_tol = 1e-11;
  double f_tol = 1e-14;
};

struct BoxOptimResult {
  Vector x;
  double value = 0.0;
  int evals = 0;
  int iters = 0;
};

inline BoxOptimResult minimize_box(const std::function<double(const Vector&)>& f,
                                   const Vector& x0, const Vector& lower,
                                   const Vector& upper, const BoxOptimOptions& opt = {}) {
  const int d = static_cast<int>(x0.size());
  auto clamp = [&](Vector v) {
    for (int j = 0; j < d; ++j) v[j] = std::min(std::max(v[j], lower[j]), upper[j]);
    return v;
  };

  BoxOptimResult res;
  res.x = clamp(x0);
  auto eval = [&](const Vector& v) {
    ++res.evals;
    return f(v);
  };
  res.value = eval(res.x);

  auto gradient = [&](const Vector& x, Vector& g) {
    for (int j = 0; j < d; ++j) {
      const double h = opt.grad_step;
      const double hi = std::min(x[j] + h, upper[j]);
      const double lo = std::max(x[j] - h, lower[j]);
      if (hi <= lo) {
        g[j] = 0.0;
        continue;
      }
      Vector xp = x, xm = x;
      xp[j] = hi;
      xm[j] = lo;
      g[j] = (eval(xp) - eval(xm)) / (hi - lo);
    }
  };

  Matrix hinv = Matrix::Identity(d, d);
  Vector g(d), gnew(d);
  gradient(res.x, g);

  for (int iter = 0; iter < opt.max_iters && res.evals < opt.max_evals; ++iter) {
    ++res.iters;
    Vector p = -(hinv * g);
    if (p.dot(g) >= 0.0) p = -g;  // reset on a non-descent direction

    double alpha = 1.0;
    Vector xnew;
    double fnew = res.value;
    bool accepted = false;
    const double slope = g.dot(p);
    for (int ls = 0; ls < 40; ++ls) {
      xnew = clamp(res.x + alpha * p);
      fnew = eval(xnew);
      if (fnew <= res.value + 1e-4 * alpha * slope || fnew < res.value - 1e-16) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
      if (res.evals >= opt.max_evals) break;
    }
    if (!accepted) break;

    const Vector s = xnew - res.x;
    if (s.lpNorm<Eigen::Infinity>() < opt.x_tol) {
      res.x = xnew;
      res.value = fnew;
      break;
    }
    const double fdrop = res.value - fnew;
    gradient(xnew, gnew);
    const Vector yv = gnew - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      // standard BFGS inverse update
      const Matrix syt = s * yv.transpose();
      const Matrix eye = Matrix::Identity(d, d);
      hinv = (eye - syt / sy) * hinv * (eye - syt.transpose() / sy) +
             s * s.transpose() / sy;
    } else {
      hinv = Matrix::Identity(d, d);
    }
    res.x = xnew;
    res.value = fnew;
    g = gnew;
    if (fdrop < opt.f_tol * (1.0 + std::abs(res.value))) break;
  }
  return res;
}

}  // namespace exset
