#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "exset/design.hpp"
#include "exset/errors.hpp"
#include "exset/simulate.hpp"

namespace exset {

using Mask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;

/// Pointwise coverage probabilities p(x) = P(x in set) over a design.
struct CoverageField {
  Design design;
  Vector p;
};

inline CoverageField coverage(const ExcursionEnsemble& ens) {
  if (ens.realizations() < 1) throw DimensionError("coverage: empty ensemble");
  CoverageField out;
  out.design = ens.design;
  out.p = ens.masks.cast<double>().colwise().mean().transpose();
  return out;
}

/// Cell volume carried by one node of a design under the uniform measure.
inline double cell_volume(const Design& design, double total_mass = 1.0) {
  return total_mass / static_cast<double>(design.size());
}

struct VorobevResult {
  double alpha = 0.0;
  Mask mask;
  double volume = 0.0;  // measure of the returned set
};

/// Vorob'ev expectation: the coverage superlevel set Q_alpha whose measure
/// brackets the target volume, i.e. mu(Q_beta) < target <= mu(Q_alpha) for
/// every beta > alpha. The level is searched over the node-value order
/// statistics. `target_volume` < 0 selects the default, the integral of the
/// coverage function (the expected excursion measure).
inline VorobevResult vorobev(const CoverageField& cov, double target_volume = -1.0) {
  const Eigen::Index r = cov.p.size();
  if (r == 0) throw DimensionError("vorobev: empty coverage field");
  const double cv = cell_volume(cov.design);
  const double target = target_volume < 0.0 ? cov.p.sum() * cv : target_volume;

  std::vector<double> levels(cov.p.data(), cov.p.data() + r);
  std::sort(levels.begin(), levels.end(), std::greater<double>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // binary search over descending levels for the largest alpha whose
  // superlevel set still reaches the target volume
  auto volume_at = [&](double alpha) {
    return cv * static_cast<double>((cov.p.array() >= alpha).count());
  };
  const double slack = 1e-12 * std::max(1.0, target);
  double alpha = levels.back();
  if (volume_at(levels.back()) < target - slack) {
    // target above the whole-domain volume: return the full mask
    alpha = levels.back();
  } else {
    std::size_t lo = 0, hi = levels.size() - 1;  // levels[hi] reaches target
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (volume_at(levels[mid]) >= target - slack) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    alpha = levels[hi];
  }
  if (target <= slack) alpha = 1.0;  // degenerate: empty target set

  VorobevResult out;
  out.alpha = alpha;
  out.mask = (cov.p.array() >= alpha).cast<std::uint8_t>();
  out.volume = cv * static_cast<double>(out.mask.cast<int>().sum());
  return out;
}

/// Mean measure of the symmetric difference between a fixed mask and the
/// ensemble realizations.
inline double vorobev_deviation(const ExcursionEnsemble& ens, const Mask& mask) {
  if (mask.size() != ens.masks.cols()) throw DimensionError("vorobev_deviation: shape mismatch");
  const double cv = cell_volume(ens.design);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ens.masks.rows(); ++i) {
    Eigen::Index diff = 0;
    for (Eigen::Index j = 0; j < mask.size(); ++j) diff += ens.masks(i, j) != mask[j];
    acc += static_cast<double>(diff);
  }
  return cv * acc / static_cast<double>(ens.masks.rows());
}

/// Per-node Euclidean distance to a set of grid nodes.
struct DistanceGrid {
  Design grid;
  Vector dist;  // unit-cube units; exactly 0 on set nodes
};

namespace detail {

constexpr double kEdtInf = 1e20;

// 1-D squared distance transform by the lower envelope of parabolas
// (Felzenszwalb & Huttenlocher 2004); exact, O(n) per line.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& out, int n,
                   std::vector<int>& v, std::vector<double>& z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kEdtInf;
  z[1] = kEdtInf;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kEdtInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    out[q] = dq * dq + f[v[k]];
  }
}

// d-dimensional squared EDT over a q^d row-major lattice via separable
// passes; distances measured in grid steps.
inline std::vector<double> edt_squared(const std::vector<double>& indicator, int d, int q) {
  std::vector<double> grid = indicator;
  std::vector<double> line(q), line_out(q), z(q + 1);
  std::vector<int> v(q);
  Eigen::Index total = 1;
  for (int j = 0; j < d; ++j) total *= q;
  // axis a has stride q^(d-1-a) in row-major (last axis fastest)
  for (int a = d - 1; a >= 0; --a) {
    Eigen::Index stride = 1;
    for (int j = a + 1; j < d; ++j) stride *= q;
    const Eigen::Index lines = total / q;
    for (Eigen::Index l = 0; l < lines; ++l) {
      // base index of the l-th line along axis a
      const Eigen::Index block = stride * q;
      const Eigen::Index base = (l / stride) * block + (l % stride);
      for (int i = 0; i < q; ++i) line[static_cast<std::size_t>(i)] = grid[base + i * stride];
      edt_1d(line, line_out, q, v, z);
      for (int i = 0; i < q; ++i) grid[base + i * stride] = line_out[static_cast<std::size_t>(i)];
    }
  }
  return grid;
}

}  // namespace detail

/// Exact Euclidean distance from every grid node to the nearest masked node,
/// in unit-cube units. An empty mask returns the domain diameter sqrt(d)
/// everywhere (the convention for empty realizations; distance functions of
/// the empty set are otherwise undefined).
inline DistanceGrid distance_transform(const Design& grid_design, const Mask& mask) {
  if (grid_design.kind != DesignKind::Grid || grid_design.grid_q < 2) {
    throw DimensionError("distance_transform: needs a Grid-kind design");
  }
  if (mask.size() != grid_design.size()) throw DimensionError("distance_transform: mask size");
  const int d = static_cast<int>(grid_design.dim());
  const int q = grid_design.grid_q;

  DistanceGrid out;
  out.grid = grid_design;
  if ((mask.array() == 0).all()) {
    out.dist = Vector::Constant(grid_design.size(), std::sqrt(static_cast<double>(d)));
    return out;
  }
  std::vector<double> indicator(static_cast<std::size_t>(grid_design.size()));
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    indicator[static_cast<std::size_t>(i)] = mask[i] ? 0.0 : detail::kEdtInf;
  }
  const std::vector<double> sq = detail::edt_squared(indicator, d, q);
  out.dist.resize(grid_design.size());
  for (Eigen::Index i = 0; i < grid_design.size(); ++i) {
    out.dist[i] = std::sqrt(sq[static_cast<std::size_t>(i)]) / static_cast<double>(q);
  }
  return out;
}

struct DistanceAverageResult {
  Mask mask;          // the distance-average set
  double u_bar = 0.0; // selected sublevel of the mean distance function
  Vector mean_dist;   // empirical mean distance function d*(x)
};

namespace detail {

inline Vector mean_distance_function(const ExcursionEnsemble& ens, bool* any_nonempty) {
  const Eigen::Index n = ens.realizations();
  const Eigen::Index r = ens.masks.cols();
  Vector acc = Vector::Zero(r);
  *any_nonempty = false;
  Mask row(r);
  for (Eigen::Index i = 0; i < n; ++i) {
    row = ens.masks.row(i).transpose();
    if ((row.array() != 0).any()) *any_nonempty = true;
    acc += distance_transform(ens.design, row).dist;
  }
  return acc / static_cast<double>(n);
}

}  // namespace detail

/// Distance-average set: sweeps candidate levels u over the values of the
/// empirical mean distance function d*, and returns the sublevel set
/// {d* <= u} whose own distance function is L2-closest to d*. Ties take the
/// smallest u. Empty realizations enter d* with the empty-set convention of
/// distance_transform; if every realization is empty the distance average is
/// undefined and this throws.
inline DistanceAverageResult distance_average(const ExcursionEnsemble& ens) {
  if (ens.realizations() < 1) throw DimensionError("distance_average: empty ensemble");
  bool any_nonempty = false;
  const Vector dbar = detail::mean_distance_function(ens, &any_nonempty);
  if (!any_nonempty) throw NumericError("distance_average: all realizations empty");

  std::vector<double> levels(dbar.data(), dbar.data() + dbar.size());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  const double cv = cell_volume(ens.design);
  DistanceAverageResult out;
  out.mean_dist = dbar;
  double best = std::numeric_limits<double>::infinity();
  for (double u : levels) {
    const Mask candidate = (dbar.array() <= u).cast<std::uint8_t>();
    const DistanceGrid dg = distance_transform(ens.design, candidate);
    const double delta_sq = (dg.dist - dbar).squaredNorm() * cv;
    if (delta_sq < best) {  // strict: keeps the infimum on ties
      best = delta_sq;
      out.mask = candidate;
      out.u_bar = u;
    }
  }
  return out;
}

/// Distance-average variability: mean squared L2 distance between the
/// per-realization distance functions and their mean, scaled by cell volume.
/// On a grid this is the distance-transform variability DTV.
inline double dav(const ExcursionEnsemble& ens) {
  if (ens.realizations() < 1) throw DimensionError("dav: empty ensemble");
  const Eigen::Index n = ens.realizations();
  const Eigen::Index r = ens.masks.cols();
  const double cv = cell_volume(ens.design);
  Matrix dists(n, r);
  Mask row(r);
  bool any_nonempty = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    row = ens.masks.row(i).transpose();
    if ((row.array() != 0).any()) any_nonempty = true;
    dists.row(i) = distance_transform(ens.design, row).dist.transpose();
  }
  if (!any_nonempty) throw NumericError("dav: all realizations empty");
  const Vector dbar = dists.colwise().mean().transpose();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += (dists.row(i).transpose() - dbar).squaredNorm() * cv;
  }
  return acc / static_cast<double>(n);
}

/// Heat-table CSV (x1, ..., xd, value) of per-node values, for plotting.
inline void write_heat_csv(const Design& design, const Vector& values, std::ostream& os) {
  const int d = static_cast<int>(design.dim());
  for (int j = 0; j < d; ++j) os << "x" << (j + 1) << ",";
  os << "value\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < design.size(); ++i) {
    for (int j = 0; j < d; ++j) os << design.points(i, j) << ",";
    os << values[i] << "\n";
  }
}

}  // namespace exset
