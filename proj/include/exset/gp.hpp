#pragma once

#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "exset/design.hpp"
#include "exset/errors.hpp"
#include "exset/kernel.hpp"
#include "exset/linalg.hpp"
#include "exset/optim.hpp"
#include "exset/rng.hpp"

namespace exset {

/// Noise-free function evaluations: locations and responses.
struct Observations {
  Design x;  // n x d
  Vector y;  // n

  Eigen::Index size() const { return x.size(); }

  void validate() const {
    if (x.size() != y.size()) throw DimensionError("observations: |X| != |y|");
    if (!y.allFinite()) throw DimensionError("observations: non-finite response");
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      for (Eigen::Index j = i + 1; j < x.size(); ++j) {
        if ((x.points.row(i) - x.points.row(j)).norm() < 1e-12) {
          throw DimensionError("observations: duplicate design rows");
        }
      }
    }
  }
};

/// Per-point solved quantities against the observation factorization; the
/// building block for conditional means and covariances.
struct GpCross {
  Vector v;        // L^{-1) k(X, x)
  double u = 0.0;  // 1 - 1^T K^{-1} k(X, x); zero in the known-mean case
  double mean = 0.0;
  double var = 0.0;  // conditional variance at the point
};

/// Column-batched GpCross over a whole design.
struct GpCrossBatch {
  Matrix v;     // n x r, column j = L^{-1} k(X, x_j)
  Vector u;     // r
  Vector mean;  // r
  Vector var;   // r
};

/// Gaussian field conditioned on noise-free observations.
///
/// With an unknown constant mean the constant is profiled out GLS-style
/// (ordinary kriging): the conditional covariance then carries the
/// + u(x) u(x') / (1^T K^{-1} 1) inflation term. With a known constant the
/// plain simple-kriging conditional moments are used. Immutable and safe to
/// share across threads once built.
class PosteriorGp {
 public:
  PosteriorGp(Observations obs, KernelSpec kernel, MeanSpec mean)
      : obs_(std::move(obs)), kernel_(std::move(kernel)), mean_(mean) {
    kernel_.validate();
    obs_.validate();
    if (obs_.x.dim() != kernel_.dim()) {
      throw DimensionError("posterior: observation dim != kernel dim");
    }
    const Matrix k = kernel_matrix(kernel_, obs_.x);
    auto chol = cholesky_with_jitter(k, kernel_.variance);
    lower_ = std::move(chol.lower);
    jitter_ = chol.jitter;

    const Eigen::Index n = obs_.size();
    const Vector ones = Vector::Ones(n);
    w_ones_ = lower_.triangularView<Eigen::Lower>().solve(ones);
    one_kinv_one_ = w_ones_.squaredNorm();
    if (mean_.known) {
      beta_ = mean_.constant;
    } else {
      if (one_kinv_one_ <= 0.0) throw NumericError("posterior: GLS system singular");
      const Vector ysol = lower_.triangularView<Eigen::Lower>().solve(obs_.y);
      beta_ = w_ones_.dot(ysol) / one_kinv_one_;
    }
    resid_half_ = lower_.triangularView<Eigen::Lower>().solve(
        (obs_.y.array() - beta_).matrix());
  }

  const Observations& obs() const { return obs_; }
  const KernelSpec& kernel() const { return kernel_; }
  const MeanSpec& mean_spec() const { return mean_; }
  double beta_hat() const { return beta_; }
  double jitter() const { return jitter_; }
  int dim() const { return kernel_.dim(); }

  GpCross cross(const Eigen::Ref<const Vector>& x) const {
    GpCross c;
    const Vector kx = kernel_cross(kernel_, obs_.x, x);
    c.v = lower_.triangularView<Eigen::Lower>().solve(kx);
    c.u = mean_.known ? 0.0 : 1.0 - w_ones_.dot(c.v);
    c.mean = beta_ + c.v.dot(resid_half_);
    double var = kernel_.variance - c.v.squaredNorm();
    if (!mean_.known) var += c.u * c.u / one_kinv_one_;
    c.var = std::max(var, 0.0);
    return c;
  }

  /// Conditional covariance between two points with their cross data and the
  /// prior covariance between them already in hand.
  double cov_from(const GpCross& a, const GpCross& b, double k_ab) const {
    double cov = k_ab - a.v.dot(b.v);
    if (!mean_.known) cov += a.u * b.u / one_kinv_one_;
    return cov;
  }

  double mean(const Eigen::Ref<const Vector>& x) const { return cross(x).mean; }
  double var(const Eigen::Ref<const Vector>& x) const { return cross(x).var; }

  double cov(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const {
    const GpCross a = cross(x);
    const GpCross b = cross(y);
    return cov_from(a, b, kernel_eval(kernel_, x, y));
  }

  /// Solved cross data for every row of a design in one triangular solve.
  GpCrossBatch cross_batch(const Design& g) const {
    const Eigen::Index n = obs_.size();
    const Eigen::Index r = g.size();
    GpCrossBatch out;
    Matrix kxg(n, r);
    for (Eigen::Index j = 0; j < r; ++j) kxg.col(j) = kernel_cross(kernel_, obs_.x, g.point(j));
    out.v = lower_.triangularView<Eigen::Lower>().solve(kxg);
    out.mean = (out.v.transpose() * resid_half_).array() + beta_;
    out.var = (kernel_.variance - out.v.colwise().squaredNorm().transpose().array()).matrix();
    if (mean_.known) {
      out.u = Vector::Zero(r);
    } else {
      out.u = (1.0 - (out.v.transpose() * w_ones_).array()).matrix();
      out.var += (out.u.array().square() / one_kinv_one_).matrix();
    }
    out.var = out.var.cwiseMax(0.0);
    return out;
  }

  Vector mean(const Design& g) const { return cross_batch(g).mean; }

  /// Conditional covariance matrix over a design.
  Matrix cov(const Design& g) const {
    const GpCrossBatch cb = cross_batch(g);
    Matrix out = kernel_matrix(kernel_, g);
    out.noalias() -= cb.v.transpose() * cb.v;
    if (!mean_.known) out.noalias() += cb.u * (cb.u.transpose() / one_kinv_one_);
    return out;
  }

  Matrix cov(const Design& a, const Design& b) const {
    const GpCrossBatch ca = cross_batch(a);
    const GpCrossBatch cb = cross_batch(b);
    Matrix out = kernel_matrix(kernel_, a, b);
    out.noalias() -= ca.v.transpose() * cb.v;
    if (!mean_.known) out.noalias() += ca.u * (cb.u.transpose() / one_kinv_one_);
    return out;
  }

  double ones_kinv_ones() const { return one_kinv_one_; }
  bool mean_known() const { return mean_.known; }

 private:
  Observations obs_;
  KernelSpec kernel_;
  MeanSpec mean_;
  Matrix lower_;
  double jitter_ = 0.0;
  Vector w_ones_;      // L^{-1} 1
  Vector resid_half_;  // L^{-1} (y - beta 1)
  double one_kinv_one_ = 0.0;
  double beta_ = 0.0;
};

inline std::shared_ptr<const PosteriorGp> posterior(Observations obs, KernelSpec kernel,
                                                    MeanSpec mean) {
  return std::make_shared<const PosteriorGp>(std::move(obs), std::move(kernel), mean);
}

enum class KrigingMode { SimpleKriging, OrdinaryKriging };

/// Affine reconstruction Z~(x) = a(x) + b(x)^T Z(Em) of the conditional
/// field from its values at the simulation points Em.
///
/// SimpleKriging: b(x) = Kn(Em,Em)^{-1} Kn(Em,x), a(x) = mn(x) - b(x)^T mn(Em),
/// so the reconstruction is unbiased for the conditional mean.
/// OrdinaryKriging: b(x) solves the sum-to-one constrained system over the
/// conditional covariance and a(x) = 0; the reconstruction kriges the
/// simulated values directly.
class AffinePredictor {
 public:
  AffinePredictor(std::shared_ptr<const PosteriorGp> gp, Design em, KrigingMode mode)
      : gp_(std::move(gp)), em_(std::move(em)), mode_(mode) {
    const Eigen::Index m = em_.size();
    if (mode_ == KrigingMode::OrdinaryKriging && m == 0) {
      throw DimensionError("kriging_weights: ordinary mode needs at least one point");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        if ((em_.points.row(i) - em_.points.row(j)).norm() < 1e-12) {
          throw DimensionError("kriging_weights: duplicate simulation points");
        }
      }
    }
    cross_.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) cross_.push_back(gp_->cross(em_.point(i)));
    mean_em_.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) mean_em_[i] = cross_[static_cast<std::size_t>(i)].mean;
    if (m > 0) {
      Matrix c(m, m);
      const Matrix prior = kernel_matrix(gp_->kernel(), em_);
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
          c(i, j) = c(j, i) = gp_->cov_from(cross_[static_cast<std::size_t>(i)],
                                            cross_[static_cast<std::size_t>(j)], prior(i, j));
        }
      }
      auto chol = cholesky_with_jitter(c, gp_->kernel().variance);
      lower_ = std::move(chol.lower);
      if (mode_ == KrigingMode::OrdinaryKriging) {
        const Vector ones = Vector::Ones(m);
        cinv_ones_ = solve_full(ones);
        ones_cinv_ones_ = cinv_ones_.sum();
        if (!(ones_cinv_ones_ > 1e-14)) {
          throw NumericError("kriging_weights: constrained system singular");
        }
      }
    }
  }

  const Design& em() const { return em_; }
  Eigen::Index size() const { return em_.size(); }
  KrigingMode mode() const { return mode_; }
  const PosteriorGp& gp() const { return *gp_; }

  /// Conditional cross-covariances Kn(Em, x).
  Vector conditional_cross(const Eigen::Ref<const Vector>& x) const {
    const GpCross cx = gp_->cross(x);
    return conditional_cross(cx, x);
  }

  Vector weights(const Eigen::Ref<const Vector>& x) const {
    if (em_.size() == 0) return Vector();
    const Vector cvec = conditional_cross(x);
    Vector b = solve_full(cvec);
    if (mode_ == KrigingMode::OrdinaryKriging) {
      b += cinv_ones_ * ((1.0 - b.sum()) / ones_cinv_ones_);
    }
    return b;
  }

  double trend(const Eigen::Ref<const Vector>& x) const {
    if (mode_ == KrigingMode::OrdinaryKriging) return 0.0;
    if (em_.size() == 0) return gp_->mean(x);
    return gp_->mean(x) - weights(x).dot(mean_em_);
  }

  /// E[Z~(x)] = a(x) + b(x)^T mn(Em).
  double predictor_mean(const Eigen::Ref<const Vector>& x) const {
    if (em_.size() == 0) return gp_->mean(x);
    return trend(x) + weights(x).dot(mean_em_);
  }

  /// Var[Z~(x)] = b(x)^T Kn(Em,Em) b(x). In simple-kriging mode this is
  /// gamma_n(x, Em) = Kn(Em,x)^T Kn(Em,Em)^{-1} Kn(Em,x).
  double predictor_variance(const Eigen::Ref<const Vector>& x) const {
    if (em_.size() == 0) return 0.0;
    if (mode_ == KrigingMode::SimpleKriging) {
      const Vector z = lower_.triangularView<Eigen::Lower>().solve(conditional_cross(x));
      return z.squaredNorm();
    }
    const Vector b = weights(x);
    const Vector lb = lower_.transpose().triangularView<Eigen::Upper>() * b;
    return lb.squaredNorm();
  }

  /// Cov[Z(x), Z~(x)] = b(x)^T Kn(Em, x).
  double predictor_cross_cov(const Eigen::Ref<const Vector>& x) const {
    if (em_.size() == 0) return 0.0;
    return weights(x).dot(conditional_cross(x));
  }

  const Vector& conditional_mean_em() const { return mean_em_; }
  const Matrix& factor() const { return lower_; }

  /// Weight matrix B (m x r) and trend vector over a whole design, for batch
  /// reconstruction of simulations: Ztilde(G) = trend + B^T Z(Em).
  std::pair<Matrix, Vector> batch(const Design& g) const {
    const Eigen::Index m = em_.size();
    const Eigen::Index r = g.size();
    Matrix b(m, r);
    Vector a(r);
    for (Eigen::Index j = 0; j < r; ++j) {
      const Vector x = g.point(j);
      if (m == 0) {
        a[j] = gp_->mean(x);
        continue;
      }
      const Vector w = weights(x);
      b.col(j) = w;
      a[j] = mode_ == KrigingMode::OrdinaryKriging ? 0.0 : gp_->mean(x) - w.dot(mean_em_);
    }
    return {std::move(b), std::move(a)};
  }

 private:
  Vector conditional_cross(const GpCross& cx, const Eigen::Ref<const Vector>& x) const {
    const Eigen::Index m = em_.size();
    Vector out(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double kix = kernel_eval(gp_->kernel(), em_.point(i), x);
      out[i] = gp_->cov_from(cross_[static_cast<std::size_t>(i)], cx, kix);
    }
    return out;
  }

  Vector solve_full(const Vector& rhs) const {
    Vector z = lower_.triangularView<Eigen::Lower>().solve(rhs);
    return lower_.transpose().triangularView<Eigen::Upper>().solve(z);
  }

  std::shared_ptr<const PosteriorGp> gp_;
  Design em_;
  KrigingMode mode_;
  std::vector<GpCross> cross_;
  Vector mean_em_;
  Matrix lower_;  // chol of Kn(Em,Em) + jitter
  Vector cinv_ones_;
  double ones_cinv_ones_ = 0.0;
};

inline AffinePredictor kriging_weights(std::shared_ptr<const PosteriorGp> gp, Design em,
                                       KrigingMode mode = KrigingMode::SimpleKriging) {
  return AffinePredictor(std::move(gp), std::move(em), mode);
}

/// s^2_{n,m}(x) = Kn(x,x) - Kn(Em,x)^T Kn(Em,Em)^{-1} Kn(Em,x), clamped at 0:
/// the conditional variance of the prediction error Z(x) - Z~(x) under
/// simple-kriging reconstruction. Empty Em returns Kn(x,x).
inline double residual_variance(const PosteriorGp& gp, const AffinePredictor& pred,
                                const Eigen::Ref<const Vector>& x) {
  const double vn = gp.var(x);
  if (pred.size() == 0) return vn;
  const Vector z =
      pred.factor().triangularView<Eigen::Lower>().solve(pred.conditional_cross(x));
  return std::max(vn - z.squaredNorm(), 0.0);
}

/// Posterior state extended by sequentially conditioning on extra points via
/// kriging update formulas, without refitting. Pseudo points carry no value:
/// only the covariance structure updates (what the selection criterion
/// needs). Valued points update mean and covariance. Persistent: add()
/// returns a new state; existing states are never mutated.
class UpdatedGp {
 public:
  explicit UpdatedGp(std::shared_ptr<const PosteriorGp> base) : base_(std::move(base)) {
    added_.points.resize(0, base_->dim());
  }

  UpdatedGp add(const Eigen::Ref<const Vector>& point, std::optional<double> value) const {
    if (has_values_ && !value.has_value() && added_.size() > 0) {
      throw DimensionError("update_posterior: cannot mix valued and pseudo updates");
    }
    if (!has_values_ && value.has_value() && added_.size() > 0) {
      throw DimensionError("update_posterior: cannot mix valued and pseudo updates");
    }
    UpdatedGp next(*this);
    const double pivot_jitter = 1e-8 * base_->kernel().variance;
    Vector cross_new(added_.size());
    const GpCross cx = base_->cross(point);
    const double k_new = cx.var;  // diagonal under the base posterior
    for (Eigen::Index i = 0; i < added_.size(); ++i) {
      const double kp = kernel_eval(base_->kernel(), added_.point(i), point);
      cross_new[i] = base_->cov_from(cross_[static_cast<std::size_t>(i)], cx, kp);
    }
    cholesky_append_row(next.lower_, cross_new, k_new + pivot_jitter, 2.5 * pivot_jitter);
    next.added_.points.conservativeResize(added_.size() + 1, base_->dim());
    next.added_.points.row(added_.size()) = point.transpose();
    next.cross_.push_back(cx);
    next.has_values_ = value.has_value();
    if (value.has_value()) {
      next.values_.conservativeResize(added_.size() + 1);
      next.values_[added_.size()] = *value;
      // refresh the half-solved innovation vector against the grown factor
      Vector innov(next.added_.size());
      for (Eigen::Index i = 0; i < next.added_.size(); ++i) {
        innov[i] = next.values_[i] - base_->mean(next.added_.point(i));
      }
      next.gain_half_ = next.lower_.triangularView<Eigen::Lower>().solve(innov);
    }
    return next;
  }

  double mean(const Eigen::Ref<const Vector>& x) const {
    const double base_mean = base_->mean(x);
    if (!has_values_ || added_.size() == 0) return base_mean;
    const Vector z = half_solve_cross(x);
    return base_mean + z.dot(gain_half_);
  }

  double cov(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const {
    const double base_cov = base_->cov(x, y);
    if (added_.size() == 0) return base_cov;
    return base_cov - half_solve_cross(x).dot(half_solve_cross(y));
  }

  double var(const Eigen::Ref<const Vector>& x) const {
    const double base_var = base_->var(x);
    if (added_.size() == 0) return base_var;
    return std::max(base_var - half_solve_cross(x).squaredNorm(), 0.0);
  }

  const Design& added_points() const { return added_; }
  const PosteriorGp& base() const { return *base_; }

 private:
  Vector half_solve_cross(const Eigen::Ref<const Vector>& x) const {
    const GpCross cx = base_->cross(x);
    Vector cvec(added_.size());
    for (Eigen::Index i = 0; i < added_.size(); ++i) {
      const double kp = kernel_eval(base_->kernel(), added_.point(i), x);
      cvec[i] = base_->cov_from(cross_[static_cast<std::size_t>(i)], cx, kp);
    }
    return lower_.triangularView<Eigen::Lower>().solve(cvec);
  }

  std::shared_ptr<const PosteriorGp> base_;
  Design added_;
  std::vector<GpCross> cross_;
  Matrix lower_ = Matrix(0, 0);
  Vector values_;
  Vector gain_half_;
  bool has_values_ = false;
};

/// Covariance-only conditioning on one more point (value unknown).
inline UpdatedGp update_posterior(const UpdatedGp& state, const Eigen::Ref<const Vector>& point,
                                  bool pseudo = true) {
  if (!pseudo) {
    throw DimensionError("update_posterior: a non-pseudo update needs a value");
  }
  return state.add(point, std::nullopt);
}

inline UpdatedGp update_posterior(const UpdatedGp& state, const Eigen::Ref<const Vector>& point,
                                  double value) {
  return state.add(point, value);
}

/// Concentrated log-likelihood of the correlation lengthscales, with the
/// constant mean and the variance profiled out analytically.
inline double concentrated_loglik(const Observations& obs, KernelFamily family,
                                  const Vector& theta) {
  const Eigen::Index n = obs.size();
  KernelSpec unit{family, 1.0, theta};
  const Matrix r = kernel_matrix(unit, obs.x);
  auto chol = cholesky_with_jitter(r, 1.0);
  const Matrix& lower = chol.lower;
  const Vector w1 = lower.triangularView<Eigen::Lower>().solve(Vector::Ones(n));
  const Vector wy = lower.triangularView<Eigen::Lower>().solve(obs.y);
  const double beta = w1.dot(wy) / w1.squaredNorm();
  const double rss = (wy - beta * w1).squaredNorm();
  double sigma2 = rss / static_cast<double>(n);
  sigma2 = std::max(sigma2, 1e-24);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(lower(i, i));
  constexpr double kLog2Pi = 1.8378770664093454836;
  return -0.5 * (static_cast<double>(n) * (std::log(sigma2) + 1.0 + kLog2Pi) + logdet);
}

struct FitResult {
  KernelSpec kernel;
  MeanSpec mean;
  double loglik = 0.0;
  bool improved = false;  // at least one local search beat its start
};

/// Maximum-likelihood fit of the lengthscales inside `bounds` (componentwise
/// [lower, upper]), multistart bounded quasi-Newton in log coordinates.
/// Deterministic given seed. Variance and constant mean come out of the
/// analytic profiles at the best lengthscales.
inline FitResult fit_mle(const Observations& obs, KernelFamily family, const Vector& lower_bound,
                         const Vector& upper_bound, int restarts = 5, std::uint64_t seed = 0) {
  obs.validate();
  const int d = static_cast<int>(obs.x.dim());
  const Eigen::Index n = obs.size();
  if (n < d + 2) throw DimensionError("fit_mle: need at least d+2 observations");
  if (lower_bound.size() != d || upper_bound.size() != d ||
      (lower_bound.array() <= 0.0).any() || (upper_bound.array() < lower_bound.array()).any() ||
      !upper_bound.allFinite()) {
    throw DimensionError("fit_mle: invalid bounds");
  }
  if (restarts < 1) restarts = 1;

  const Vector log_lo = lower_bound.array().log();
  const Vector log_hi = upper_bound.array().log();
  auto objective = [&](const Vector& log_theta) {
    return -concentrated_loglik(obs, family, log_theta.array().exp().matrix());
  };

  Rng rng(Rng::child_seed(seed, 0x6d6c65));
  Vector best_x;
  double best_f = std::numeric_limits<double>::infinity();
  bool improved = false;
  for (int t = 0; t < restarts; ++t) {
    Vector x0(d);
    if (t == 0) {
      x0 = 0.5 * (log_lo + log_hi);  // geometric-mean start
    } else {
      for (int j = 0; j < d; ++j) x0[j] = log_lo[j] + rng.uniform() * (log_hi[j] - log_lo[j]);
    }
    const double f0 = objective(x0);
    BoxOptimOptions opt;
    opt.max_iters = 80;
    opt.grad_step = 1e-5;
    const BoxOptimResult res = minimize_box(objective, x0, log_lo, log_hi, opt);
    const double fbest = std::min(res.value, f0);
    const Vector xbest = res.value <= f0 ? res.x : x0;
    if (res.value < f0 - 1e-12) improved = true;
    if (fbest < best_f) {
      best_f = fbest;
      best_x = xbest;
    }
  }

  const Vector theta = best_x.array().exp().matrix();
  KernelSpec unit{family, 1.0, theta};
  const Matrix r = kernel_matrix(unit, obs.x);
  auto chol = cholesky_with_jitter(r, 1.0);
  const Vector w1 = chol.lower.triangularView<Eigen::Lower>().solve(Vector::Ones(n));
  const Vector wy = chol.lower.triangularView<Eigen::Lower>().solve(obs.y);
  const double beta = w1.dot(wy) / w1.squaredNorm();
  double sigma2 = (wy - beta * w1).squaredNorm() / static_cast<double>(n);
  sigma2 = std::max(sigma2, 1e-18);  // zero-variance data pins the boundary

  FitResult out;
  out.kernel = KernelSpec{family, sigma2, theta};
  out.mean = MeanSpec{beta, false};
  out.loglik = -best_f;
  out.improved = improved;
  return out;
}

/// Versioned plain-text serialization of a fitted model (kernel family,
/// lengthscales, variance, constant, observations).
inline void write_model(const PosteriorGp& gp, std::ostream& os) {
  os.precision(17);
  os << "exset-model 1\n";
  os << "family " << to_string(gp.kernel().family) << "\n";
  os << "dim " << gp.dim() << "\n";
  os << "variance " << gp.kernel().variance << "\n";
  os << "lengthscales";
  for (int j = 0; j < gp.dim(); ++j) os << " " << gp.kernel().lengthscales[j];
  os << "\n";
  os << "mean " << (gp.mean_spec().known ? gp.mean_spec().constant : gp.beta_hat()) << "\n";
  os << "mean_known " << (gp.mean_spec().known ? 1 : 0) << "\n";
  os << "n " << gp.obs().size() << "\n";
  for (Eigen::Index i = 0; i < gp.obs().size(); ++i) {
    for (int j = 0; j < gp.dim(); ++j) os << gp.obs().x.points(i, j) << " ";
    os << gp.obs().y[i] << "\n";
  }
}

inline void write_model(const PosteriorGp& gp, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ResourceError("cannot open " + path + " for writing");
  write_model(gp, os);
}

inline std::shared_ptr<const PosteriorGp> read_model(std::istream& is) {
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (tag != "exset-model" || version != 1) throw ConfigError("model file: bad header");
  std::string key, family_name;
  int d = 0;
  double variance = 0.0;
  is >> key >> family_name;
  if (key != "family") throw ConfigError("model file: expected 'family'");
  is >> key >> d;
  if (key != "dim" || d < 1) throw ConfigError("model file: bad 'dim'");
  is >> key >> variance;
  if (key != "variance") throw ConfigError("model file: expected 'variance'");
  Vector theta(d);
  is >> key;
  if (key != "lengthscales") throw ConfigError("model file: expected 'lengthscales'");
  for (int j = 0; j < d; ++j) is >> theta[j];
  double mean_const = 0.0;
  int mean_known = 0;
  is >> key >> mean_const;
  if (key != "mean") throw ConfigError("model file: expected 'mean'");
  is >> key >> mean_known;
  if (key != "mean_known") throw ConfigError("model file: expected 'mean_known'");
  Eigen::Index n = 0;
  is >> key >> n;
  if (key != "n" || n < 1) throw ConfigError("model file: bad 'n'");
  Observations obs;
  obs.x.kind = DesignKind::Explicit;
  obs.x.points.resize(n, d);
  obs.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) is >> obs.x.points(i, j);
    is >> obs.y[i];
  }
  if (!is) throw ConfigError("model file: truncated data section");
  KernelSpec kernel{kernel_family_from_string(family_name), variance, theta};
  MeanSpec mean{mean_const, mean_known != 0};
  return posterior(std::move(obs), std::move(kernel), mean);
}

inline std::shared_ptr<const PosteriorGp> read_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ResourceError("cannot open " + path);
  return read_model(is);
}

}  // namespace exset
