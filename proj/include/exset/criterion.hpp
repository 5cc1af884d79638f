#pragma once

#include <cstdint>
#include <limits>
#include <memory>

#include "exset/bvn.hpp"
#include "exset/design.hpp"
#include "exset/excursion.hpp"
#include "exset/gp.hpp"
#include "exset/simulate.hpp"

namespace exset {

namespace detail {

// Misclassification probability of one point from its conditional moments,
// for the unbiased (simple kriging) reconstruction: Z and Z~ share the mean,
// Var Z = var, Var Z~ = Cov(Z, Z~) = gamma. c1 is mean - threshold in the
// "above" form.
inline double rho_from_moments(double c1, double var, double gamma, std::uint64_t& phi2_count) {
  if (var <= 1e-300) return 0.0;  // field degenerate: Z == Z~ == mean a.s.
  gamma = std::min(std::max(gamma, 0.0), var);
  Matrix sigma(2, 2);
  sigma << var, -gamma, -gamma, gamma;
  Vector c(2);
  c << c1, -c1;
  phi2_count += 2;
  return rho_parts(c, sigma);
}

}  // namespace detail

/// rho for a general affine reconstruction (any weights/trend): builds the
/// centered bivariate problem from the predictor moments.
inline double rho_general(const AffinePredictor& pred, const ExcursionSpec& exc,
                          const Eigen::Ref<const Vector>& x) {
  const double s = exc.sign();
  const double mean_z = pred.gp().mean(x);
  const double var_z = pred.gp().var(x);
  const double mean_zt = pred.predictor_mean(x);
  const double var_zt = pred.predictor_variance(x);
  const double cov = pred.predictor_cross_cov(x);
  if (var_z <= 1e-300 && var_zt <= 1e-300) {
    const double c1 = s * (mean_z - exc.threshold);
    const double c2 = s * (exc.threshold - mean_zt);
    // atoms: {Z >= t} is closed, {Z~ < t} open
    return ((c1 >= 0.0 && c2 > 0.0) ? 1.0 : 0.0) + ((c1 < 0.0 && c2 <= 0.0) ? 1.0 : 0.0);
  }
  Vector c(2);
  c << s * (mean_z - exc.threshold), s * (exc.threshold - mean_zt);
  Matrix sigma(2, 2);
  sigma << var_z, -cov, -cov, var_zt;
  return rho_parts(c, sigma);
}

/// Selection-criterion state: a posterior model, an excursion spec, the
/// simulation points chosen so far, and per-node caches over a fixed set of
/// integration nodes.
///
/// The caches are maintained by kriging update formulas: adding a point
/// appends one row to the Cholesky factor of Kn(Em,Em) and one row to the
/// solved node cross-covariance matrix, so criterion evaluations never refit
/// anything. Read-only use (rho / edm / candidate scans) is safe from
/// several threads; extending the point set requires exclusive access.
class CriterionState {
 public:
  CriterionState(std::shared_ptr<const PosteriorGp> gp, ExcursionSpec exc,
                 IntegrationMeasure measure)
      : gp_(std::move(gp)), exc_(exc), measure_(std::move(measure)) {
    measure_.validate();
    if (measure_.nodes.dim() != gp_->dim()) {
      throw DimensionError("criterion: node dimension != model dimension");
    }
    em_.kind = DesignKind::Explicit;
    em_.points.resize(0, gp_->dim());
    nodes_ = gp_->cross_batch(measure_.nodes);
    const double s = exc_.sign();
    c1_ = (s * (nodes_.mean.array() - exc_.threshold)).matrix();
    gamma_ = Vector::Zero(measure_.nodes.size());
    w_ = Matrix(0, measure_.nodes.size());
    jitter_ = 1e-8 * gp_->kernel().variance;
  }

  const PosteriorGp& gp() const { return *gp_; }
  std::shared_ptr<const PosteriorGp> gp_ptr() const { return gp_; }
  const ExcursionSpec& excursion() const { return exc_; }
  const IntegrationMeasure& measure() const { return measure_; }
  const Design& em() const { return em_; }
  Eigen::Index point_count() const { return em_.size(); }
  std::uint64_t phi2_evals() const { return phi2_evals_; }

  /// Misclassification probability rho_{n,m}(x) at an arbitrary point, for
  /// the simple-kriging reconstruction from the current Em.
  double rho(const Eigen::Ref<const Vector>& x) const {
    const GpCross cx = gp_->cross(x);
    double gamma = 0.0;
    if (em_.size() > 0) {
      const Vector z = lower_.triangularView<Eigen::Lower>().solve(cross_to_em(cx, x));
      gamma = z.squaredNorm();
    }
    return detail::rho_from_moments(exc_.sign() * (cx.mean - exc_.threshold), cx.var, gamma,
                                    phi2_evals_);
  }

  /// Expected distance in measure over the cached node set.
  double edm() const {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < gamma_.size(); ++j) {
      sum += detail::rho_from_moments(c1_[j], nodes_.var[j], gamma_[j], phi2_evals_);
    }
    return measure_.total_mass * sum / static_cast<double>(gamma_.size());
  }

  /// Expected distance in measure over an arbitrary measure (generic path;
  /// the cached node set short-circuits to the fast version).
  double edm(const IntegrationMeasure& mu) const {
    mu.validate();
    if (mu.nodes.size() == measure_.nodes.size() && mu.nodes.dim() == measure_.nodes.dim() &&
        (mu.nodes.points.array() == measure_.nodes.points.array()).all()) {
      return measure_.total_mass == mu.total_mass
                 ? edm()
                 : edm() * mu.total_mass / measure_.total_mass;
    }
    double sum = 0.0;
    for (Eigen::Index j = 0; j < mu.nodes.size(); ++j) sum += rho(mu.nodes.point(j));
    return mu.total_mass * sum / static_cast<double>(mu.nodes.size());
  }

  /// EDM after hypothetically adding `e`, computed against the cached nodes
  /// with one rank-one variance update. Returns +infinity for a candidate
  /// that duplicates a current point (degenerate update).
  double edm_with_candidate(const Eigen::Ref<const Vector>& e) const {
    ++candidate_evals_;
    Candidate cand;
    if (!prepare_candidate(e, cand)) return std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < gamma_.size(); ++j) {
      const double w = cand.node_w[j];
      sum += detail::rho_from_moments(c1_[j], nodes_.var[j], gamma_[j] + w * w, phi2_evals_);
    }
    return measure_.total_mass * sum / static_cast<double>(gamma_.size());
  }

  /// Extends Em by one point and refreshes the node caches.
  void add_point(const Eigen::Ref<const Vector>& e) {
    Candidate cand;
    if (!prepare_candidate(e, cand)) {
      throw DegenerateUpdateError("criterion: new simulation point duplicates Em");
    }
    cholesky_append_row(lower_, cand.cross_em, cand.var_e + jitter_, 0.5 * jitter_);
    const Eigen::Index m = em_.size();
    em_.points.conservativeResize(m + 1, gp_->dim());
    em_.points.row(m) = e.transpose();
    em_cross_.push_back(cand.cx);
    w_.conservativeResize(m + 1, Eigen::NoChange);
    w_.row(m) = cand.node_w.transpose();
    gamma_ += cand.node_w.array().square().matrix();
    gamma_ = gamma_.cwiseMin(nodes_.var);
  }

  /// Coverage-uncertainty weights w(x) = p(x)(1 - p(x)) over a design, used
  /// to seed the integrand maximization.
  Vector coverage_weights(const Design& g) const {
    const GpCrossBatch cb = gp_->cross_batch(g);
    const double s = exc_.sign();
    Vector w(g.size());
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      const double sd = std::sqrt(std::max(cb.var[j], 0.0));
      const double p =
          sd > 0.0 ? norm_cdf(s * (cb.mean[j] - exc_.threshold) / sd)
                   : (s * (cb.mean[j] - exc_.threshold) >= 0.0 ? 1.0 : 0.0);
      w[j] = p * (1.0 - p);
    }
    return w;
  }

  std::uint64_t candidate_evals() const { return candidate_evals_; }

 private:
  struct Candidate {
    GpCross cx;
    Vector cross_em;  // Kn(Em, e)
    double var_e = 0.0;
    Vector node_w;  // per-node conditional covariance to e over sqrt(schur)
  };

  Vector cross_to_em(const GpCross& cx, const Eigen::Ref<const Vector>& x) const {
    Vector out(em_.size());
    for (Eigen::Index i = 0; i < em_.size(); ++i) {
      const double k = kernel_eval(gp_->kernel(), em_.point(i), x);
      out[i] = gp_->cov_from(em_cross_[static_cast<std::size_t>(i)], cx, k);
    }
    return out;
  }

  bool prepare_candidate(const Eigen::Ref<const Vector>& e, Candidate& cand) const {
    cand.cx = gp_->cross(e);
    cand.cross_em = cross_to_em(cand.cx, e);
    cand.var_e = cand.cx.var;

    Vector z;
    double schur = cand.var_e + jitter_;
    if (em_.size() > 0) {
      z = lower_.triangularView<Eigen::Lower>().solve(cand.cross_em);
      schur -= z.squaredNorm();
    }
    if (schur < 2.5 * jitter_) return false;
    const double ell = std::sqrt(schur);

    // Kn(nodes, e), vectorized against the cached node cross data
    const Eigen::Index r = measure_.nodes.size();
    Vector kn(r);
    for (Eigen::Index j = 0; j < r; ++j) {
      kn[j] = kernel_eval(gp_->kernel(), measure_.nodes.point(j), e);
    }
    kn.noalias() -= nodes_.v.transpose() * cand.cx.v;
    if (!gp_->mean_known()) {
      kn += nodes_.u * (cand.cx.u / gp_->ones_kinv_ones());
    }
    if (em_.size() > 0) kn.noalias() -= w_.transpose() * z;
    cand.node_w = kn / ell;
    return true;
  }

  std::shared_ptr<const PosteriorGp> gp_;
  ExcursionSpec exc_;
  IntegrationMeasure measure_;
  Design em_;
  std::vector<GpCross> em_cross_;
  Matrix lower_ = Matrix(0, 0);  // chol of Kn(Em,Em) + jitter I
  double jitter_ = 0.0;

  GpCrossBatch nodes_;
  Vector c1_;     // sign * (mn - t) per node
  Vector gamma_;  // Var Z~ per node
  Matrix w_;      // m x r, L^{-1} Kn(Em, nodes)

  mutable std::uint64_t phi2_evals_ = 0;
  mutable std::uint64_t candidate_evals_ = 0;
};

/// Monte-Carlo counterpart of the expected distance in measure: mean over
/// paired realizations of the measure of the symmetric difference.
inline double edm_empirical(const ExcursionEnsemble& realizations,
                            const ExcursionEnsemble& reconstructions,
                            const IntegrationMeasure& mu) {
  if (realizations.masks.rows() != reconstructions.masks.rows() ||
      realizations.masks.cols() != reconstructions.masks.cols()) {
    throw DimensionError("edm_empirical: ensemble shapes differ");
  }
  if (realizations.masks.cols() != mu.nodes.size()) {
    throw DimensionError("edm_empirical: ensembles not on the measure's node set");
  }
  const Eigen::Index n = realizations.masks.rows();
  const Eigen::Index r = realizations.masks.cols();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index mismatches = 0;
    for (Eigen::Index j = 0; j < r; ++j) {
      mismatches += realizations.masks(i, j) != reconstructions.masks(i, j);
    }
    acc += static_cast<double>(mismatches) / static_cast<double>(r);
  }
  return mu.total_mass * acc / static_cast<double>(n);
}

}  // namespace exset
