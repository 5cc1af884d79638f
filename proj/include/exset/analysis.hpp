#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "exset/errors.hpp"
#include "exset/excursion.hpp"
#include "exset/randomsets.hpp"
#include "exset/simulate.hpp"

namespace exset {

/// Arc lengths of the threshold level set, one per realization.
struct LengthSample {
  Vector lengths;        // unit-cube units
  double epsilon = 0.0;  // degenerate-cell tie tolerance
  int grid_q = 0;
};

namespace detail {

// crossing position on an edge whose endpoint values straddle t
inline double edge_frac(double va, double vb, double t, double eps) {
  const double span = vb - va;
  if (std::abs(span) <= eps) return 0.5;
  return std::min(std::max((t - va) / span, 0.0), 1.0);
}

// level-set polyline length inside one q x q field via marching squares;
// saddle cells are resolved by the cell-center value
inline double marching_squares_length(const double* field, int q, double t, double eps) {
  double total = 0.0;
  auto seg = [](double x0, double y0, double x1, double y1) {
    const double dx = x1 - x0;
    const double dy = y1 - y0;
    return std::sqrt(dx * dx + dy * dy);
  };
  for (int i = 0; i + 1 < q; ++i) {
    for (int j = 0; j + 1 < q; ++j) {
      const double va = field[i * q + j];            // (0,0)
      const double vb = field[(i + 1) * q + j];      // (1,0)
      const double vc = field[(i + 1) * q + j + 1];  // (1,1)
      const double vd = field[i * q + j + 1];        // (0,1)
      const int code = (va >= t ? 1 : 0) | (vb >= t ? 2 : 0) | (vc >= t ? 4 : 0) |
                       (vd >= t ? 8 : 0);
      if (code == 0 || code == 15) continue;
      // crossing coordinates in cell-local units
      const double ab_x = edge_frac(va, vb, t, eps);  // bottom edge, y=0
      const double bc_y = edge_frac(vb, vc, t, eps);  // right edge, x=1
      const double dc_x = edge_frac(vd, vc, t, eps);  // top edge, y=1
      const double ad_y = edge_frac(va, vd, t, eps);  // left edge, x=0
      switch (code) {
        case 1:
        case 14:
          total += seg(ab_x, 0.0, 0.0, ad_y);
          break;
        case 2:
        case 13:
          total += seg(ab_x, 0.0, 1.0, bc_y);
          break;
        case 3:
        case 12:
          total += seg(0.0, ad_y, 1.0, bc_y);
          break;
        case 4:
        case 11:
          total += seg(1.0, bc_y, dc_x, 1.0);
          break;
        case 6:
        case 9:
          total += seg(ab_x, 0.0, dc_x, 1.0);
          break;
        case 7:
        case 8:
          total += seg(0.0, ad_y, dc_x, 1.0);
          break;
        case 5: {
          const double center = 0.25 * (va + vb + vc + vd);
          if (center >= t) {
            total += seg(ab_x, 0.0, 1.0, bc_y) + seg(0.0, ad_y, dc_x, 1.0);
          } else {
            total += seg(ab_x, 0.0, 0.0, ad_y) + seg(1.0, bc_y, dc_x, 1.0);
          }
          break;
        }
        case 10: {
          const double center = 0.25 * (va + vb + vc + vd);
          if (center >= t) {
            total += seg(ab_x, 0.0, 0.0, ad_y) + seg(1.0, bc_y, dc_x, 1.0);
          } else {
            total += seg(ab_x, 0.0, 1.0, bc_y) + seg(0.0, ad_y, dc_x, 1.0);
          }
          break;
        }
        default:
          break;
      }
    }
  }
  return total;
}

}  // namespace detail

/// Per-realization arc length of the t-level set on a 2-D grid, extracted by
/// marching squares with linear interpolation along cell edges. This is the
/// piecewise-linear level-set approximation; `epsilon` only breaks ties in
/// degenerate (flat) cells.
inline LengthSample contour_length(const FieldEnsemble& ens, const ExcursionSpec& exc,
                                   double epsilon = 1e-12) {
  if (ens.design.kind != DesignKind::Grid || ens.design.dim() != 2) {
    throw DimensionError("contour_length: needs a 2-D Grid-kind design");
  }
  const int q = ens.design.grid_q;
  LengthSample out;
  out.epsilon = epsilon;
  out.grid_q = q;
  out.lengths.resize(ens.realizations());
  std::vector<double> field(static_cast<std::size_t>(q) * q);
  const double cell = 1.0 / static_cast<double>(q);
  for (Eigen::Index i = 0; i < ens.realizations(); ++i) {
    for (Eigen::Index k = 0; k < ens.values.cols(); ++k) {
      field[static_cast<std::size_t>(k)] = ens.values(i, k);
    }
    out.lengths[i] =
        cell * detail::marching_squares_length(field.data(), q, exc.threshold, epsilon);
  }
  return out;
}

/// Excursion volumes (mask fractions), optionally recentered so the sample
/// mean equals the coverage integral, which is exact under the posterior.
/// Quasi-realization volumes are biased low (the reconstruction is smoother
/// than the field); recentering removes that first-moment bias.
struct VolumeSample {
  Vector volumes;  // in [0,1]
  bool recentered = false;
  double center = 0.0;  // mean used for recentering
  int clipped = 0;      // values clipped back into [0,1] after the shift
};

inline VolumeSample volume_distribution(const ExcursionEnsemble& ens, bool correct_bias = false,
                                        const CoverageField* cov = nullptr) {
  VolumeSample out;
  const Eigen::Index n = ens.realizations();
  const double r = static_cast<double>(ens.masks.cols());
  out.volumes.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.volumes[i] = static_cast<double>(ens.masks.row(i).cast<int>().sum()) / r;
  }
  if (correct_bias) {
    if (cov == nullptr) throw DimensionError("volume_distribution: bias correction needs coverage");
    const double target = cov->p.mean();
    const double shift = target - out.volumes.mean();
    out.volumes.array() += shift;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (out.volumes[i] < 0.0 || out.volumes[i] > 1.0) {
        out.volumes[i] = std::min(std::max(out.volumes[i], 0.0), 1.0);
        ++out.clipped;
      }
    }
    out.recentered = true;
    out.center = target;
  }
  return out;
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject_5pct = false;
};

/// Two-sample Kolmogorov-Smirnov test: sup distance between empirical CDFs
/// and the asymptotic p-value at effective size na*nb/(na+nb).
inline KsResult ks_two_sample(const Vector& a, const Vector& b) {
  if (a.size() == 0 || b.size() == 0) throw DimensionError("ks_two_sample: empty sample");
  std::vector<double> sa(a.data(), a.data() + a.size());
  std::vector<double> sb(b.data(), b.data() + b.size());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < sa.size() && ib < sb.size()) {
    const double x = std::min(sa[ia], sb[ib]);
    while (ia < sa.size() && sa[ia] <= x) ++ia;
    while (ib < sb.size() && sb[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  KsResult out;
  out.statistic = d;
  const double lambda = std::sqrt(na * nb / (na + nb)) * d;
  // Kolmogorov asymptotic series, truncated (adequate for n >= 500)
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * std::pow(-1.0, j - 1) * std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-16) break;
  }
  out.p_value = std::min(std::max(p, 0.0), 1.0);
  out.reject_5pct = out.p_value < 0.05;
  return out;
}

/// Single-column CSV with '#' metadata comments.
inline void write_sample_csv(const Vector& values, const std::string& column,
                             const std::vector<std::string>& metadata, std::ostream& os) {
  for (const auto& line : metadata) os << "# " << line << "\n";
  os << column << "\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < values.size(); ++i) os << values[i] << "\n";
}

}  // namespace exset
