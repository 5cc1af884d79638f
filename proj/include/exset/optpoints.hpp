#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "exset/criterion.hpp"
#include "exset/design.hpp"
#include "exset/optim.hpp"
#include "exset/rng.hpp"

namespace exset {

enum class PointAlgorithm { A, B };

struct OptimizerConfig {
  int m = 10;
  PointAlgorithm algorithm = PointAlgorithm::B;
  int population = 40;     // A: genetic search population
  int generations = 15;    // A: genetic search generations
  int polish_evals = 50;   // A: budget of the quasi-Newton polish
  int multistarts = 12;    // B: weighted multistart count
  Eigen::Index w_design_size = 4096;  // B: size of the start-sampling design
  std::uint64_t seed = 0;

  void validate() const {
    if (m < 1) throw DimensionError("optimizer config: m >= 1 required");
    if (population < 2 || generations < 1 || multistarts < 1) {
      throw DimensionError("optimizer config: counts must be >= 1");
    }
  }
};

/// One greedy step of either algorithm, for the per-step trace CSV.
struct StepTrace {
  int step = 0;
  std::uint64_t candidate_evals = 0;
  double criterion_value = 0.0;  // edm for A, selected rho for B
};

struct OptPointsResult {
  Design points;
  std::vector<StepTrace> trace;
};

namespace detail {

// Deterministic tie-break: lowest lexicographic coordinate wins.
inline bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a[j] != b[j]) return a[j] < b[j];
  }
  return false;
}

inline bool better_point(double va, const Vector& xa, double vb, const Vector& xb) {
  if (va != vb) return va < vb;
  return lex_less(xa, xb);
}

// Real-coded genetic minimizer on the unit cube: tournament selection,
// blend crossover, Gaussian mutation, one elite.
template <typename F>
Vector genetic_minimize(const F& f, int d, int population, int generations, Rng& rng,
                        Vector* value_out) {
  std::vector<Vector> pop(static_cast<std::size_t>(population));
  std::vector<double> fit(static_cast<std::size_t>(population));
  for (int i = 0; i < population; ++i) {
    Vector x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.uniform();
    pop[static_cast<std::size_t>(i)] = x;
    fit[static_cast<std::size_t>(i)] = f(x);
  }
  auto tournament = [&]() -> int {
    int best = static_cast<int>(rng.below(static_cast<std::uint64_t>(population)));
    for (int k = 1; k < 3; ++k) {
      const int cand = static_cast<int>(rng.below(static_cast<std::uint64_t>(population)));
      if (better_point(fit[static_cast<std::size_t>(cand)], pop[static_cast<std::size_t>(cand)],
                       fit[static_cast<std::size_t>(best)], pop[static_cast<std::size_t>(best)])) {
        best = cand;
      }
    }
    return best;
  };
  for (int gen = 0; gen < generations; ++gen) {
    const double mut_sd = 0.12 * (1.0 - 0.8 * gen / std::max(1, generations - 1));
    std::vector<Vector> next(static_cast<std::size_t>(population));
    std::vector<double> next_fit(static_cast<std::size_t>(population));
    int elite = 0;
    for (int i = 1; i < population; ++i) {
      if (better_point(fit[static_cast<std::size_t>(i)], pop[static_cast<std::size_t>(i)],
                       fit[static_cast<std::size_t>(elite)], pop[static_cast<std::size_t>(elite)])) {
        elite = i;
      }
    }
    next[0] = pop[static_cast<std::size_t>(elite)];
    next_fit[0] = fit[static_cast<std::size_t>(elite)];
    for (int i = 1; i < population; ++i) {
      const Vector& pa = pop[static_cast<std::size_t>(tournament())];
      const Vector& pb = pop[static_cast<std::size_t>(tournament())];
      Vector child(d);
      for (int j = 0; j < d; ++j) {
        // BLX-0.5 blend
        const double lo = std::min(pa[j], pb[j]);
        const double hi = std::max(pa[j], pb[j]);
        const double span = hi - lo;
        double v = lo - 0.5 * span + rng.uniform() * 2.0 * span;
        if (span == 0.0) v = lo;
        if (rng.uniform() < 0.25) v += mut_sd * rng.normal();
        child[j] = std::min(std::max(v, 0.0), 1.0);
      }
      next[static_cast<std::size_t>(i)] = child;
      next_fit[static_cast<std::size_t>(i)] = f(child);
    }
    pop.swap(next);
    fit.swap(next_fit);
  }
  int best = 0;
  for (int i = 1; i < population; ++i) {
    if (better_point(fit[static_cast<std::size_t>(i)], pop[static_cast<std::size_t>(i)],
                     fit[static_cast<std::size_t>(best)], pop[static_cast<std::size_t>(best)])) {
      best = i;
    }
  }
  if (value_out) {
    value_out->resize(1);
    (*value_out)[0] = fit[static_cast<std::size_t>(best)];
  }
  return pop[static_cast<std::size_t>(best)];
}

// Weighted sampling without replacement; weights are consumed (zeroed).
inline Eigen::Index draw_weighted(Vector& weights, double& total, Rng& rng) {
  const double target = rng.uniform() * total;
  double acc = 0.0;
  Eigen::Index pick = -1;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (acc >= target && weights[i] > 0.0) {
      pick = i;
      break;
    }
  }
  if (pick < 0) {
    // numerical slack: fall back to the heaviest remaining node
    weights.maxCoeff(&pick);
  }
  total -= weights[pick];
  weights[pick] = 0.0;
  return pick;
}

}  // namespace detail

/// Greedy minimization of the expected distance in measure: the i-th point
/// is the (approximate) argmin over x of edm(E_{i-1} + {x}), found by a
/// real-coded genetic search followed by a numerical-gradient quasi-Newton
/// polish. Criterion evaluations run on kriging update formulas; nothing is
/// refit per candidate. Extends `state` in place and returns the chosen
/// points. Deterministic given cfg.seed.
inline OptPointsResult algorithm_a(CriterionState& state, const OptimizerConfig& cfg) {
  cfg.validate();
  const int d = static_cast<int>(state.gp().dim());
  OptPointsResult out;
  out.points.kind = DesignKind::Explicit;
  out.points.points.resize(cfg.m, d);
  Rng rng(Rng::child_seed(cfg.seed, 0xa));

  for (int i = 0; i < cfg.m; ++i) {
    const std::uint64_t evals_before = state.candidate_evals();
    auto objective = [&](const Vector& x) { return state.edm_with_candidate(x); };
    Vector ga_val;
    Vector best = detail::genetic_minimize(objective, d, cfg.population, cfg.generations, rng,
                                           &ga_val);
    double best_val = ga_val[0];

    BoxOptimOptions popt;
    popt.max_evals = cfg.polish_evals;
    popt.max_iters = cfg.polish_evals;
    popt.grad_step = 1e-5;
    const BoxOptimResult polished = minimize_box(objective, best, Vector::Zero(d),
                                                 Vector::Ones(d), popt);
    if (detail::better_point(polished.value, polished.x, best_val, best)) {
      best = polished.x;
      best_val = polished.value;
    }
    if (!std::isfinite(best_val)) {
      // degenerate candidate (duplicate of an existing point): resample
      // uniformly until a valid one appears
      for (int attempt = 0; attempt < 1000; ++attempt) {
        Vector x(d);
        for (int j = 0; j < d; ++j) x[j] = rng.uniform();
        const double v = state.edm_with_candidate(x);
        if (std::isfinite(v)) {
          best = x;
          best_val = v;
          break;
        }
      }
      if (!std::isfinite(best_val)) {
        throw DegenerateUpdateError("algorithm A: no valid candidate found");
      }
    }
    state.add_point(best);
    out.points.points.row(i) = best.transpose();
    out.trace.push_back({i + 1, state.candidate_evals() - evals_before, state.edm()});
  }
  return out;
}

/// Greedy maximization of the integrand rho itself: the i-th point maximizes
/// rho_{n,i-1}(x) via bounded quasi-Newton with numerical gradients,
/// multistarted from points drawn proportionally to the coverage-uncertainty
/// weights w(x) = p(x)(1-p(x)) on a fine space-filling design. Much cheaper
/// than algorithm A since no integral is evaluated. Extends `state` in place.
inline OptPointsResult algorithm_b(CriterionState& state, const OptimizerConfig& cfg) {
  cfg.validate();
  const int d = static_cast<int>(state.gp().dim());
  OptPointsResult out;
  out.points.kind = DesignKind::Explicit;
  out.points.points.resize(cfg.m, d);
  Rng rng(Rng::child_seed(cfg.seed, 0xb));

  const Design w_design = sobol(d, cfg.w_design_size, 1);
  const Vector w_all = state.coverage_weights(w_design);

  for (int i = 0; i < cfg.m; ++i) {
    const std::uint64_t evals_before = state.phi2_evals();
    auto objective = [&](const Vector& x) { return -state.rho(x); };

    Vector weights = w_all;
    double total = weights.sum();
    Vector best;
    double best_val = std::numeric_limits<double>::infinity();
    for (int s = 0; s < cfg.multistarts && total > 0.0; ++s) {
      const Eigen::Index pick = detail::draw_weighted(weights, total, rng);
      const Vector x0 = w_design.point(pick);
      BoxOptimOptions opt;
      opt.max_iters = 40;
      opt.grad_step = 1e-5;
      const BoxOptimResult res = minimize_box(objective, x0, Vector::Zero(d), Vector::Ones(d), opt);
      if (best.size() == 0 || detail::better_point(res.value, res.x, best_val, best)) {
        best = res.x;
        best_val = res.value;
      }
    }

    bool collapsed = best.size() == 0 || !(best_val < 0.0);
    if (!collapsed && state.point_count() > 0) {
      double min_dist = std::numeric_limits<double>::infinity();
      for (Eigen::Index pj = 0; pj < state.em().size(); ++pj) {
        min_dist = std::min(min_dist, (state.em().points.row(pj).transpose() - best).norm());
      }
      collapsed = min_dist < 1e-10;
    }
    if (collapsed) {
      // all starts collapsed onto existing points: fall back to the global
      // argmax of w over the start design, skipping near-duplicates
      Vector fallback = w_all;
      for (Eigen::Index k = 0; k < fallback.size(); ++k) {
        for (Eigen::Index pj = 0; pj < state.em().size(); ++pj) {
          if ((state.em().points.row(pj) - w_design.points.row(k)).norm() < 1e-10) {
            fallback[k] = -1.0;
          }
        }
      }
      Eigen::Index pick = 0;
      fallback.maxCoeff(&pick);
      best = w_design.point(pick);
      best_val = -state.rho(best);
    }

    state.add_point(best);
    out.points.points.row(i) = best.transpose();
    (void)evals_before;
    out.trace.push_back({i + 1, state.phi2_evals() - evals_before, -best_val});
  }
  return out;
}

inline OptPointsResult optimize_points(CriterionState& state, const OptimizerConfig& cfg) {
  return cfg.algorithm == PointAlgorithm::A ? algorithm_a(state, cfg) : algorithm_b(state, cfg);
}

}  // namespace exset
