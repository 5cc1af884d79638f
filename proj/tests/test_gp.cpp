#include <gtest/gtest.h>

#include <sstream>

#include "exset/gp.hpp"
#include "exset/simulate.hpp"
#include "exset/testfunctions.hpp"

using namespace exset;

namespace {

KernelSpec kernel52(double var, double theta, int d) {
  return KernelSpec{KernelFamily::Matern52, var, Vector::Constant(d, theta)};
}

Observations branin_obs(int n, std::uint64_t seed = 1) {
  Observations obs;
  obs.x = maximin_lhs(2, n, seed);
  obs.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) obs.y[i] = branin_neg(obs.x.point(i));
  return obs;
}

std::shared_ptr<const PosteriorGp> toy_gp(int n = 8, double theta = 0.4,
                                          std::uint64_t seed = 3) {
  Observations obs;
  obs.x = maximin_lhs(2, n, seed);
  obs.y.resize(n);
  // draw responses from a fixed smooth function
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector p = obs.x.point(i);
    obs.y[i] = std::sin(3.0 * p[0]) + 0.5 * std::cos(5.0 * p[1]);
  }
  return posterior(std::move(obs), kernel52(1.2, theta, 2), MeanSpec{0.0, false});
}

}  // namespace

TEST(Posterior, InterpolatesData) {
  auto gp = toy_gp(10);
  const double yrange = gp->obs().y.maxCoeff() - gp->obs().y.minCoeff();
  for (Eigen::Index i = 0; i < gp->obs().size(); ++i) {
    const Vector x = gp->obs().x.point(i);
    EXPECT_NEAR(gp->mean(x), gp->obs().y[i], 1e-6 * yrange);
    EXPECT_NEAR(gp->var(x), 0.0, 1e-6 * gp->kernel().variance);
    // cross-covariance with any other point also vanishes at data
    EXPECT_NEAR(gp->cov(x, Vector::Constant(2, 0.1234)), 0.0, 1e-5 * gp->kernel().variance);
  }
}

TEST(Posterior, SinglePointInterpolation) {
  Observations obs;
  obs.x.points.resize(1, 1);
  obs.x.points << 0.5;
  obs.y.resize(1);
  obs.y << 2.0;
  auto gp = posterior(std::move(obs), kernel52(1.0, 0.3, 1), MeanSpec{0.0, false});
  Vector x(1);
  x << 0.5;
  EXPECT_NEAR(gp->mean(x), 2.0, 1e-9);
  EXPECT_NEAR(gp->var(x), 0.0, 1e-7);
}

TEST(Posterior, FarFieldVarianceInflation) {
  // far from the data the ordinary-kriging variance tends to
  // sigma^2 + 1/(1^T K^{-1} 1), never below the prior variance
  Observations obs;
  obs.x.points.resize(3, 1);
  obs.x.points << 0.01, 0.02, 0.03;
  obs.y.resize(3);
  obs.y << 0.4, 0.5, 0.6;
  KernelSpec k = kernel52(2.0, 0.01, 1);
  auto gp = posterior(std::move(obs), k, MeanSpec{0.0, false});
  Vector x(1);
  x << 0.99;  // ~100 lengthscales away
  const double expected = k.variance + 1.0 / gp->ones_kinv_ones();
  EXPECT_NEAR(gp->var(x), expected, 1e-6 * k.variance);
  EXPECT_GE(gp->var(x), k.variance - 1e-9);
}

TEST(Posterior, VarianceNonNegativeEverywhere) {
  auto gp = toy_gp(12);
  const Design probe = sobol(2, 400, 1);
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    EXPECT_GE(gp->var(probe.point(i)), 0.0);
  }
}

TEST(Posterior, CovarianceMatchesMonteCarlo) {
  auto gp = toy_gp(6, 0.5);
  Design pair;
  pair.points.resize(2, 2);
  pair.points << 0.25, 0.65, 0.7, 0.3;
  const Eigen::Index n = 20000;
  const FieldEnsemble ens = simulate_full(*gp, pair, n, 99);
  const Vector a = ens.values.col(0);
  const Vector b = ens.values.col(1);
  const double mean_a = a.mean(), mean_b = b.mean();
  const double cov_hat = ((a.array() - mean_a) * (b.array() - mean_b)).sum() / (n - 1);
  const double var_a = (a.array() - mean_a).square().sum() / (n - 1);
  const double var_b = (b.array() - mean_b).square().sum() / (n - 1);
  const double cov_true = gp->cov(pair.point(0), pair.point(1));
  // standard error of a sample covariance of bivariate normals
  const double se = std::sqrt((var_a * var_b + cov_true * cov_true) / n);
  EXPECT_NEAR(cov_hat, cov_true, 4.0 * se);
}

TEST(Posterior, BatchAgreesWithPointwise) {
  auto gp = toy_gp(9);
  const Design probe = sobol(2, 60, 5);
  const GpCrossBatch batch = gp->cross_batch(probe);
  for (Eigen::Index i = 0; i < probe.size(); i += 7) {
    const GpCross c = gp->cross(probe.point(i));
    EXPECT_NEAR(batch.mean[i], c.mean, 1e-12);
    EXPECT_NEAR(batch.var[i], c.var, 1e-12);
    EXPECT_NEAR(batch.u[i], c.u, 1e-12);
  }
  const Matrix cov = gp->cov(probe);
  for (Eigen::Index i = 0; i < probe.size(); i += 11) {
    for (Eigen::Index j = 0; j < probe.size(); j += 13) {
      EXPECT_NEAR(cov(i, j), gp->cov(probe.point(i), probe.point(j)), 1e-10);
    }
  }
}

TEST(KrigingWeights, UnitWeightsAtSimulationPoints) {
  auto gp = toy_gp(7);
  const Design em = sobol(2, 5, 9);
  const AffinePredictor pred = kriging_weights(gp, em);
  for (Eigen::Index j = 0; j < em.size(); ++j) {
    const Vector b = pred.weights(em.point(j));
    for (Eigen::Index i = 0; i < em.size(); ++i) {
      EXPECT_NEAR(b[i], i == j ? 1.0 : 0.0, 1e-5);
    }
    EXPECT_NEAR(pred.trend(em.point(j)), 0.0, 1e-5);
    // gamma equals the field variance there
    EXPECT_NEAR(pred.predictor_variance(em.point(j)), gp->var(em.point(j)),
                1e-5 * gp->kernel().variance);
  }
}

TEST(KrigingWeights, SinglePointScalarFormula) {
  auto gp = toy_gp(6);
  Design em;
  em.points.resize(1, 2);
  em.points << 0.42, 0.58;
  const AffinePredictor pred = kriging_weights(gp, em);
  Vector x(2);
  x << 0.2, 0.8;
  const double expected =
      gp->cov(em.point(0), x) / (gp->var(em.point(0)) + 1e-8 * gp->kernel().variance);
  EXPECT_NEAR(pred.weights(x)[0], expected, 1e-9);
}

TEST(KrigingWeights, OrdinarySumsToOne) {
  auto gp = toy_gp(8);
  const Design em = sobol(2, 6, 3);
  const AffinePredictor pred = kriging_weights(gp, em, KrigingMode::OrdinaryKriging);
  const Design probe = sobol(2, 50, 31);
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    EXPECT_NEAR(pred.weights(probe.point(i)).sum(), 1.0, 1e-8);
    EXPECT_DOUBLE_EQ(pred.trend(probe.point(i)), 0.0);
  }
}

TEST(KrigingWeights, Prop1cCovarianceIdentity) {
  // for simple kriging weights, Cov(Z, Z~) = Var(Z~) = gamma
  auto gp = toy_gp(8);
  const Design em = sobol(2, 10, 17);
  const AffinePredictor pred = kriging_weights(gp, em);
  const Design probe = sobol(2, 30, 41);
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    const Vector x = probe.point(i);
    const double gamma = pred.predictor_variance(x);
    EXPECT_NEAR(pred.predictor_cross_cov(x), gamma, 1e-8 * gp->kernel().variance);
    // and the predictor is conditionally unbiased
    EXPECT_NEAR(pred.predictor_mean(x), gp->mean(x), 1e-8);
  }
}

TEST(ResidualVariance, MatchesJointConditioning) {
  auto gp = toy_gp(8);
  const Design em = sobol(2, 10, 23);
  const AffinePredictor pred = kriging_weights(gp, em);
  // conditioning on X_n and Em jointly must give the same variance
  Observations joint;
  const Eigen::Index n = gp->obs().size();
  joint.x.points.resize(n + em.size(), 2);
  joint.x.points.topRows(n) = gp->obs().x.points;
  joint.x.points.bottomRows(em.size()) = em.points;
  joint.y.resize(n + em.size());
  joint.y.head(n) = gp->obs().y;
  for (Eigen::Index j = 0; j < em.size(); ++j) joint.y[n + j] = gp->mean(em.point(j));
  auto gp_joint = posterior(std::move(joint), gp->kernel(), gp->mean_spec());

  const Design probe = sobol(2, 40, 3);
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    const Vector x = probe.point(i);
    const double s2 = residual_variance(*gp, pred, x);
    EXPECT_GE(s2, 0.0);
    EXPECT_NEAR(s2, gp_joint->var(x), 2e-6 * gp->kernel().variance);
  }
  // on Em the residual variance vanishes
  for (Eigen::Index j = 0; j < em.size(); ++j) {
    EXPECT_NEAR(residual_variance(*gp, pred, em.point(j)), 0.0, 1e-6 * gp->kernel().variance);
  }
}

TEST(ResidualVariance, EmptyAndNestedDesigns) {
  auto gp = toy_gp(7);
  Design empty;
  empty.points.resize(0, 2);
  const AffinePredictor none = kriging_weights(gp, empty);
  Vector x(2);
  x << 0.3, 0.6;
  EXPECT_DOUBLE_EQ(residual_variance(*gp, none, x), gp->var(x));

  const Design big = sobol(2, 12, 7);
  Design small;
  small.points = big.points.topRows(5);
  const AffinePredictor ps = kriging_weights(gp, small);
  const AffinePredictor pb = kriging_weights(gp, big);
  const Design probe = sobol(2, 25, 19);
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    EXPECT_LE(residual_variance(*gp, pb, probe.point(i)),
              residual_variance(*gp, ps, probe.point(i)) + 1e-10);
  }
}

TEST(UpdatePosterior, MatchesFullRecomputation) {
  auto gp = toy_gp(8, 0.35, 11);
  Rng rng(71);
  UpdatedGp state(gp);
  Design added;
  added.points.resize(5, 2);
  Vector values(5);
  for (int i = 0; i < 5; ++i) {
    Vector p(2);
    p << rng.uniform(), rng.uniform();
    added.points.row(i) = p.transpose();
    values[i] = std::sin(7.0 * p[0]) * std::cos(2.0 * p[1]);
    state = update_posterior(state, p, values[i]);
  }
  Observations joint;
  const Eigen::Index n = gp->obs().size();
  joint.x.points.resize(n + 5, 2);
  joint.x.points.topRows(n) = gp->obs().x.points;
  joint.x.points.bottomRows(5) = added.points;
  joint.y.resize(n + 5);
  joint.y.head(n) = gp->obs().y;
  joint.y.tail(5) = values;
  auto refit = posterior(std::move(joint), gp->kernel(), gp->mean_spec());

  const Design probe = sobol(2, 100, 13);
  const double tol = 1e-8 * gp->kernel().variance;
  double worst_cov = 0.0, worst_mean = 0.0;
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    const Vector x = probe.point(i);
    worst_mean = std::max(worst_mean, std::abs(state.mean(x) - refit->mean(x)));
    for (Eigen::Index j = i; j < probe.size(); j += 17) {
      worst_cov = std::max(
          worst_cov, std::abs(state.cov(x, probe.point(j)) - refit->cov(x, probe.point(j))));
    }
  }
  // jitter placement differs between the two routes; stay within the ladder
  EXPECT_LT(worst_cov, 100 * tol);
  EXPECT_LT(worst_mean, 1e-4);
}

TEST(UpdatePosterior, PseudoUpdateZeroesVariance) {
  auto gp = toy_gp(6);
  UpdatedGp state(gp);
  Vector p(2);
  p << 0.37, 0.81;
  state = update_posterior(state, p, true);
  EXPECT_NEAR(state.var(p), 0.0, 1e-6 * gp->kernel().variance);
  // mean is untouched by a pseudo update
  EXPECT_DOUBLE_EQ(state.mean(p), gp->mean(p));
}

TEST(UpdatePosterior, UpdatesCommute) {
  auto gp = toy_gp(6);
  Vector a(2), b(2);
  a << 0.2, 0.4;
  b << 0.7, 0.9;
  UpdatedGp ab(gp), ba(gp);
  ab = update_posterior(update_posterior(ab, a, true), b, true);
  ba = update_posterior(update_posterior(ba, b, true), a, true);
  const Design probe = sobol(2, 50, 29);
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    for (Eigen::Index j = i; j < probe.size(); j += 9) {
      EXPECT_NEAR(ab.cov(probe.point(i), probe.point(j)),
                  ba.cov(probe.point(i), probe.point(j)), 1e-8 * gp->kernel().variance);
    }
  }
}

TEST(UpdatePosterior, DuplicateUpdateRejected) {
  auto gp = toy_gp(6);
  UpdatedGp state(gp);
  Vector p(2);
  p << 0.5, 0.5;
  state = update_posterior(state, p, true);
  EXPECT_THROW(update_posterior(state, p, true), DegenerateUpdateError);
}

TEST(FitMle, ConstantDataPinsVarianceBoundary) {
  Observations obs;
  obs.x = maximin_lhs(2, 8, 5);
  obs.y = Vector::Constant(8, 3.25);
  const FitResult fit = fit_mle(obs, KernelFamily::Matern52, Vector::Constant(2, 0.05),
                                Vector::Constant(2, 2.0), 2, 1);
  EXPECT_NEAR(fit.mean.constant, 3.25, 1e-8);
  EXPECT_LT(fit.kernel.variance, 1e-12);
}

TEST(FitMle, LikelihoodAtLeastTruth) {
  // fit on data drawn from a known kernel; the fitted likelihood must not
  // fall below the likelihood of the generating parameters
  KernelSpec truth = kernel52(1.0, 0.3, 2);
  Observations obs;
  obs.x = maximin_lhs(2, 8, 77);
  obs.y.resize(8);
  {
    const Matrix k = kernel_matrix(truth, obs.x);
    auto chol = cholesky_with_jitter(k, truth.variance);
    Rng rng(13);
    Vector xi(8);
    for (int i = 0; i < 8; ++i) xi[i] = rng.normal();
    obs.y = chol.lower * xi;
  }
  const FitResult fit = fit_mle(obs, KernelFamily::Matern52, Vector::Constant(2, 0.05),
                                Vector::Constant(2, 2.0), 5, 2);
  const double at_truth = concentrated_loglik(obs, KernelFamily::Matern52, truth.lengthscales);
  EXPECT_GE(fit.loglik, at_truth - 1e-6);
}

TEST(FitMle, MultistartNeverBelowBestStart) {
  Observations obs = branin_obs(14, 3);
  const Vector lo = Vector::Constant(2, 0.05);
  const Vector hi = Vector::Constant(2, 2.0);
  const FitResult fit = fit_mle(obs, KernelFamily::Matern32, lo, hi, 5, 7);
  // the geometric-mean start is always among the multistart points
  const Vector mid = (lo.array().log() * 0.5 + hi.array().log() * 0.5).exp().matrix();
  EXPECT_GE(fit.loglik, concentrated_loglik(obs, KernelFamily::Matern32, mid) - 1e-9);
}

TEST(FitMle, BraninLooBeatsPriorScale) {
  // leave-one-out errors of the fitted model stay well inside the fitted
  // prior standard deviation; oracle is a plain n-fold refit loop
  Observations obs = branin_obs(20, 1);
  const FitResult fit = fit_mle(obs, KernelFamily::Matern32, Vector::Constant(2, 0.05),
                                Vector::Constant(2, 2.0), 5, 1);
  double abs_err = 0.0;
  for (Eigen::Index hold = 0; hold < obs.size(); ++hold) {
    Observations rest;
    rest.x.points.resize(obs.size() - 1, 2);
    rest.y.resize(obs.size() - 1);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < obs.size(); ++i) {
      if (i == hold) continue;
      rest.x.points.row(k) = obs.x.points.row(i);
      rest.y[k] = obs.y[i];
      ++k;
    }
    auto gp = posterior(std::move(rest), fit.kernel, fit.mean);
    abs_err += std::abs(gp->mean(obs.x.point(hold)) - obs.y[hold]);
  }
  abs_err /= static_cast<double>(obs.size());
  EXPECT_LT(abs_err, std::sqrt(fit.kernel.variance));
}

TEST(ModelIo, RoundTrip) {
  Observations obs = branin_obs(12, 9);
  const FitResult fit = fit_mle(obs, KernelFamily::Matern32, Vector::Constant(2, 0.05),
                                Vector::Constant(2, 2.0), 2, 4);
  auto gp = posterior(obs, fit.kernel, fit.mean);
  std::stringstream ss;
  write_model(*gp, ss);
  auto back = read_model(ss);
  EXPECT_EQ(back->kernel().family, gp->kernel().family);
  EXPECT_DOUBLE_EQ(back->kernel().variance, gp->kernel().variance);
  EXPECT_TRUE((back->kernel().lengthscales.array() == gp->kernel().lengthscales.array()).all());
  const Design probe = sobol(2, 20, 3);
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    EXPECT_DOUBLE_EQ(back->mean(probe.point(i)), gp->mean(probe.point(i)));
    EXPECT_DOUBLE_EQ(back->var(probe.point(i)), gp->var(probe.point(i)));
  }
}

TEST(Observations, DuplicateRowsRejected) {
  Observations obs;
  obs.x.points.resize(2, 2);
  obs.x.points << 0.5, 0.5, 0.5, 0.5 + 1e-14;
  obs.y.resize(2);
  obs.y << 1.0, 2.0;
  EXPECT_THROW(obs.validate(), DimensionError);
}

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
