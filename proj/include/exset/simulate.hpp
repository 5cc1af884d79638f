#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>

#include "exset/design.hpp"
#include "exset/errors.hpp"
#include "exset/excursion.hpp"
#include "exset/gp.hpp"
#include "exset/linalg.hpp"
#include "exset/rng.hpp"

namespace exset {

enum class Provenance { FullDesign, QuasiRealization };

/// N simulated field paths over a design, realization-major (row i = path i).
struct FieldEnsemble {
  Design design;
  Matrix values;  // N x r
  Provenance provenance = Provenance::FullDesign;
  int quasi_m = 0;  // simulation-point count behind quasi realizations

  Eigen::Index realizations() const { return values.rows(); }
};

/// Boolean excursion masks over a design, one row per realization.
struct ExcursionEnsemble {
  Design design;
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> masks;  // N x r
  ExcursionSpec exc;

  Eigen::Index realizations() const { return masks.rows(); }
};

namespace detail {

// Standard-normal matrix with one independent, seed-addressed stream per
// realization (row), so results do not depend on batching or thread count.
inline Matrix normal_rows(Eigen::Index n_rows, Eigen::Index n_cols, std::uint64_t seed) {
  Matrix out(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    Rng rng(Rng::child_seed(seed, static_cast<std::uint64_t>(i)));
    for (Eigen::Index j = 0; j < n_cols; ++j) out(i, j) = rng.normal();
  }
  return out;
}

}  // namespace detail

/// Conditional simulation by matrix decomposition: N draws of
/// mn(G) + L xi with L the Cholesky factor of Kn(G,G) + jitter.
/// Deterministic given seed. The design size is capped (the factorization
/// is O(r^3) and dense).
inline FieldEnsemble simulate_full(const PosteriorGp& gp, const Design& g, Eigen::Index n_real,
                                   std::uint64_t seed, Eigen::Index cap = 10000) {
  if (g.size() > cap) throw ResourceError("simulate_full: design exceeds the size cap");
  if (n_real < 1) throw DimensionError("simulate_full: need N >= 1");
  const Vector mean = gp.mean(g);
  const Matrix cov = gp.cov(g);
  auto chol = cholesky_with_jitter(cov, gp.kernel().variance);

  FieldEnsemble out;
  out.design = g;
  out.provenance = Provenance::FullDesign;
  out.values.resize(n_real, g.size());
  const Eigen::Index block = 256;
  for (Eigen::Index start = 0; start < n_real; start += block) {
    const Eigen::Index b = std::min(block, n_real - start);
    Matrix xi(g.size(), b);
    for (Eigen::Index i = 0; i < b; ++i) {
      Rng rng(Rng::child_seed(seed, static_cast<std::uint64_t>(start + i)));
      for (Eigen::Index j = 0; j < g.size(); ++j) xi(j, i) = rng.normal();
    }
    Matrix draws = chol.lower.triangularView<Eigen::Lower>() * xi;
    draws.colwise() += mean;
    out.values.middleRows(start, b) = draws.transpose();
  }
  return out;
}

/// Quasi-realizations: draw Z(Em) exactly (m x m factorization), then map
/// each draw through the affine predictor onto the full design. Cost is
/// O(N r m + m^3) per batch against O(r^3 + N r^2) for full-design
/// simulation. With G = Em and the same seed this reproduces simulate_full
/// draw for draw.
inline FieldEnsemble quasi_realizations(const PosteriorGp& gp, const AffinePredictor& pred,
                                        const Design& g, Eigen::Index n_real,
                                        std::uint64_t seed) {
  if (&pred.gp() != &gp) throw DimensionError("quasi_realizations: predictor built from another model");
  if (n_real < 1) throw DimensionError("quasi_realizations: need N >= 1");
  const Eigen::Index m = pred.size();
  if (m == 0) throw DimensionError("quasi_realizations: predictor has no simulation points");
  if (m > g.size()) throw DimensionError("quasi_realizations: m > r");

  const Matrix xi = detail::normal_rows(n_real, m, seed);  // N x m
  Matrix z_em = xi * pred.factor().transpose();            // N x m, rows ~ N(0, Kn(Em,Em))
  z_em.rowwise() += pred.conditional_mean_em().transpose();

  auto [weights, trend] = pred.batch(g);  // m x r, r
  FieldEnsemble out;
  out.design = g;
  out.provenance = Provenance::QuasiRealization;
  out.quasi_m = static_cast<int>(m);
  out.values = z_em * weights;
  out.values.rowwise() += trend.transpose();
  return out;
}

/// Coupled draws of the field at Em and, conditionally, at G: the returned
/// pair holds full paths and their quasi reconstructions driven by the same
/// Z(Em) values. Realization i of both ensembles consumes one RNG stream, m
/// normals for Z(Em) then r normals for the conditional remainder.
inline std::pair<FieldEnsemble, FieldEnsemble> simulate_coupled(const PosteriorGp& gp,
                                                                const AffinePredictor& pred,
                                                                const Design& g,
                                                                Eigen::Index n_real,
                                                                std::uint64_t seed) {
  const Eigen::Index m = pred.size();
  const Eigen::Index r = g.size();
  if (m == 0) throw DimensionError("simulate_coupled: predictor has no simulation points");

  // residual covariance of Z(G) given Z(Em) (and the data)
  const Matrix cross = gp.cov(pred.em(), g);  // m x r
  const Matrix half = pred.factor().triangularView<Eigen::Lower>().solve(cross);
  Matrix resid_cov = gp.cov(g);
  resid_cov.noalias() -= half.transpose() * half;
  auto resid_chol = cholesky_with_jitter(resid_cov, gp.kernel().variance);
  const Matrix gain = pred.factor().transpose().triangularView<Eigen::Upper>().solve(half);

  auto [weights, trend] = pred.batch(g);
  const Vector mean_g = gp.mean(g);
  const Vector mean_em = pred.conditional_mean_em();

  FieldEnsemble full, quasi;
  full.design = g;
  quasi.design = g;
  full.provenance = Provenance::FullDesign;
  quasi.provenance = Provenance::QuasiRealization;
  quasi.quasi_m = static_cast<int>(m);
  full.values.resize(n_real, r);
  quasi.values.resize(n_real, r);

  Vector xi(m), eta(r);
  for (Eigen::Index i = 0; i < n_real; ++i) {
    Rng rng(Rng::child_seed(seed, static_cast<std::uint64_t>(i)));
    for (Eigen::Index j = 0; j < m; ++j) xi[j] = rng.normal();
    for (Eigen::Index j = 0; j < r; ++j) eta[j] = rng.normal();
    const Vector z_em = mean_em + pred.factor().triangularView<Eigen::Lower>() * xi;
    quasi.values.row(i) = (trend + weights.transpose() * z_em).transpose();
    const Vector cond_mean = mean_g + gain.transpose() * (z_em - mean_em);
    full.values.row(i) =
        (cond_mean + resid_chol.lower.triangularView<Eigen::Lower>() * eta).transpose();
  }
  return {std::move(full), std::move(quasi)};
}

/// Threshold an ensemble into excursion masks.
inline ExcursionEnsemble excursions(const FieldEnsemble& ens, const ExcursionSpec& exc) {
  ExcursionEnsemble out;
  out.design = ens.design;
  out.exc = exc;
  out.masks.resize(ens.values.rows(), ens.values.cols());
  if (exc.direction == ExcursionDirection::Above) {
    out.masks = (ens.values.array() >= exc.threshold).cast<std::uint8_t>();
  } else {
    out.masks = (ens.values.array() <= exc.threshold).cast<std::uint8_t>();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary ensemble files. Little-endian layout:
//   4 x uint64 header {N, r, d, flags}, flags bit0: 1 = bit-packed masks,
//   0 = row-major float64 values. Masks are packed per realization,
//   ceil(r/8) bytes, LSB first.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline void write_ensemble(const FieldEnsemble& ens, std::ostream& os) {
  detail::put_u64(os, static_cast<std::uint64_t>(ens.values.rows()));
  detail::put_u64(os, static_cast<std::uint64_t>(ens.values.cols()));
  detail::put_u64(os, static_cast<std::uint64_t>(ens.design.dim()));
  detail::put_u64(os, 0);
  for (Eigen::Index i = 0; i < ens.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < ens.values.cols(); ++j) {
      const double v = ens.values(i, j);
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(v));
      std::memcpy(&bits, &v, 8);
      detail::put_u64(os, bits);
    }
  }
}

inline void write_ensemble(const ExcursionEnsemble& ens, std::ostream& os) {
  const Eigen::Index n = ens.masks.rows();
  const Eigen::Index r = ens.masks.cols();
  detail::put_u64(os, static_cast<std::uint64_t>(n));
  detail::put_u64(os, static_cast<std::uint64_t>(r));
  detail::put_u64(os, static_cast<std::uint64_t>(ens.design.dim()));
  detail::put_u64(os, 1);
  const Eigen::Index bytes = (r + 7) / 8;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index b = 0; b < bytes; ++b) {
      unsigned char packed = 0;
      for (int k = 0; k < 8; ++k) {
        const Eigen::Index j = 8 * b + k;
        if (j < r && ens.masks(i, j)) packed |= static_cast<unsigned char>(1u << k);
      }
      os.put(static_cast<char>(packed));
    }
  }
}

/// Per-node summary of an ensemble: coordinates, mean and standard deviation.
inline void write_ensemble_summary_csv(const FieldEnsemble& ens, std::ostream& os) {
  const int d = static_cast<int>(ens.design.dim());
  for (int j = 0; j < d; ++j) os << "x" << (j + 1) << ",";
  os << "mean,sd\n";
  os.precision(17);
  const Eigen::Index n = ens.values.rows();
  for (Eigen::Index j = 0; j < ens.values.cols(); ++j) {
    const double mean = ens.values.col(j).mean();
    const double sd = n > 1 ? std::sqrt((ens.values.col(j).array() - mean).square().sum() /
                                        static_cast<double>(n - 1))
                            : 0.0;
    for (int k = 0; k < d; ++k) os << ens.design.points(j, k) << ",";
    os << mean << "," << sd << "\n";
  }
}

}  // namespace exset
