#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "exset/detail/sobol_table.hpp"
#include "exset/errors.hpp"
#include "exset/linalg.hpp"
#include "exset/rng.hpp"

namespace exset {

enum class DesignKind { Sobol, MaximinLhs, Grid, Explicit };

/// A finite point set in the unit cube [0,1]^d, one point per row.
struct Design {
  Matrix points;  // r x d
  DesignKind kind = DesignKind::Explicit;
  int grid_q = 0;  // points per axis, Grid kind only

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  Vector point(Eigen::Index i) const { return points.row(i).transpose(); }

  /// First r rows. Only Sobol' prefixes keep their kind; a prefix of an LHS
  /// or grid is just an explicit point set.
  Design head(Eigen::Index r) const {
    Design out;
    out.points = points.topRows(r);
    out.kind = kind == DesignKind::Sobol ? DesignKind::Sobol : DesignKind::Explicit;
    return out;
  }
};

namespace detail {

// 32-bit direction numbers for one Sobol' dimension, already shifted so that
// v[k] carries bit k of the output (v[0] has the MSB).
inline std::vector<std::uint32_t> sobol_directions(int dim_index) {
  constexpr int kBits = 32;
  std::vector<std::uint32_t> v(kBits);
  if (dim_index == 0) {
    for (int k = 0; k < kBits; ++k) v[k] = 1u << (31 - k);
    return v;
  }
  const SobolRow& row = kSobolRows[dim_index - 1];
  const int s = row.degree;
  for (int k = 0; k < std::min(s, kBits); ++k) v[k] = row.minit[k] << (31 - k);
  for (int k = s; k < kBits; ++k) {
    std::uint32_t value = v[k - s] ^ (v[k - s] >> s);
    for (int j = 1; j < s; ++j) {
      if ((row.coeff >> (s - 1 - j)) & 1u) value ^= v[k - j];
    }
    v[k] = value;
  }
  return v;
}

}  // namespace detail

/// First `r` points of the d-dimensional Sobol' sequence after skipping
/// `skip` points. Index 0 of the sequence is the origin (the generator keeps
/// the conventional initial point rather than dropping it). Uses the
/// Joe-Kuo direction numbers in Gray code order; reproducible bit for bit.
inline Design sobol(int d, Eigen::Index r, std::uint64_t skip = 0) {
  if (d < 1 || d > detail::kSobolMaxDim) {
    throw DimensionError("sobol: dimension must be in [1, " +
                         std::to_string(detail::kSobolMaxDim) + "]");
  }
  if (r < 1) throw DimensionError("sobol: need r >= 1");
  std::vector<std::vector<std::uint32_t>> dirs(d);
  for (int j = 0; j < d; ++j) dirs[j] = detail::sobol_directions(j);

  Design out;
  out.kind = DesignKind::Sobol;
  out.points.resize(r, d);
  for (Eigen::Index i = 0; i < r; ++i) {
    const std::uint64_t index = skip + static_cast<std::uint64_t>(i);
    const std::uint64_t gray = index ^ (index >> 1);
    for (int j = 0; j < d; ++j) {
      std::uint32_t x = 0;
      for (int b = 0; b < 32; ++b) {
        if ((gray >> b) & 1ULL) x ^= dirs[j][b];
      }
      out.points(i, j) = static_cast<double>(x) * 0x1.0p-32;
    }
  }
  return out;
}

/// Tensor-product lattice with q cell-centered coordinates (i+0.5)/q per
/// axis, row-major (last axis fastest). Memory capped at `max_points` nodes.
inline Design grid(int d, int q, Eigen::Index max_points = 4'000'000) {
  if (d < 1) throw DimensionError("grid: need d >= 1");
  if (q < 2) throw DimensionError("grid: need q >= 2");
  double total = std::pow(static_cast<double>(q), d);
  if (total > static_cast<double>(max_points)) {
    throw ResourceError("grid: q^d exceeds the configured cap");
  }
  const Eigen::Index r = static_cast<Eigen::Index>(total + 0.5);
  Design out;
  out.kind = DesignKind::Grid;
  out.grid_q = q;
  out.points.resize(r, d);
  std::vector<int> idx(d, 0);
  for (Eigen::Index k = 0; k < r; ++k) {
    for (int j = 0; j < d; ++j) out.points(k, j) = (idx[j] + 0.5) / q;
    for (int j = d - 1; j >= 0; --j) {
      if (++idx[j] < q) break;
      idx[j] = 0;
    }
  }
  return out;
}

/// Lexicographic node index of a grid multi-index (last axis fastest).
inline Eigen::Index grid_index(int q, const std::vector<int>& multi) {
  Eigen::Index k = 0;
  for (int i : multi) k = k * q + i;
  return k;
}

inline std::vector<int> grid_multi_index(int q, int d, Eigen::Index k) {
  std::vector<int> multi(d);
  for (int j = d - 1; j >= 0; --j) {
    multi[j] = static_cast<int>(k % q);
    k /= q;
  }
  return multi;
}

namespace detail {

inline double min_pairwise_sq(const Matrix& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < pts.rows(); ++j) {
      best = std::min(best, (pts.row(i) - pts.row(j)).squaredNorm());
    }
  }
  return best;
}

inline Matrix random_lhs(int d, Eigen::Index r, Rng& rng) {
  Matrix pts(r, d);
  std::vector<Eigen::Index> perm(r);
  for (int j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) perm[i] = i;
    // Fisher-Yates with our own rng for reproducibility
    for (Eigen::Index i = r - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    }
    for (Eigen::Index i = 0; i < r; ++i) {
      pts(i, j) = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(r);
    }
  }
  return pts;
}

// Point-exchange descent: swap one coordinate between two points (keeps the
// Latin property) whenever it strictly improves the maximin distance.
inline void maximin_exchange(Matrix& pts, Rng& rng) {
  const Eigen::Index r = pts.rows();
  const int d = static_cast<int>(pts.cols());
  Matrix d2(r, r);
  d2.setZero();
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      d2(i, j) = i == j ? std::numeric_limits<double>::infinity()
                        : (pts.row(i) - pts.row(j)).squaredNorm();
    }
  }
  auto current_min = [&]() {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < r; ++i) m = std::min(m, d2.row(i).minCoeff());
    return m;
  };
  double best = current_min();
  const int sweeps = 60;
  const Eigen::Index moves = sweeps * r;
  for (Eigen::Index step = 0; step < moves; ++step) {
    const Eigen::Index a = static_cast<Eigen::Index>(rng.below(r));
    Eigen::Index b = static_cast<Eigen::Index>(rng.below(r - 1));
    if (b >= a) ++b;
    const int j = static_cast<int>(rng.below(d));
    std::swap(pts(a, j), pts(b, j));
    bool ok = true;
    std::vector<double> na(r), nb(r);
    for (Eigen::Index i = 0; i < r && ok; ++i) {
      if (i != a) {
        na[i] = (pts.row(i) - pts.row(a)).squaredNorm();
        if (i != b && na[i] <= best) ok = false;
      }
      if (i != b) {
        nb[i] = (pts.row(i) - pts.row(b)).squaredNorm();
        if (i != a && nb[i] <= best) ok = false;
      }
    }
    if (!ok) {
      std::swap(pts(a, j), pts(b, j));  // revert
      continue;
    }
    for (Eigen::Index i = 0; i < r; ++i) {
      if (i != a) d2(i, a) = d2(a, i) = na[i];
      if (i != b) d2(i, b) = d2(b, i) = nb[i];
    }
    const double candidate = current_min();
    if (candidate > best) {
      best = candidate;
    } else if (candidate < best) {
      std::swap(pts(a, j), pts(b, j));
      for (Eigen::Index i = 0; i < r; ++i) {
        if (i != a) d2(i, a) = d2(a, i) = (pts.row(i) - pts.row(a)).squaredNorm();
        if (i != b) d2(i, b) = d2(b, i) = (pts.row(i) - pts.row(b)).squaredNorm();
      }
    }
  }
}

// Coordinate refinement inside each point's own stratum. Exchanges alone
// cannot move a point within its cell, which leaves a systematic gap to the
// attainable maximin distance; this closes it while keeping the Latin
// property exact.
inline void maximin_within_cell(Matrix& pts) {
  const Eigen::Index r = pts.rows();
  const int d = static_cast<int>(pts.cols());
  const double width = 1.0 / static_cast<double>(r);
  Matrix d2(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      d2(i, j) = i == j ? std::numeric_limits<double>::infinity()
                        : (pts.row(i) - pts.row(j)).squaredNorm();
    }
  }
  for (int sweep = 0; sweep < 4; ++sweep) {
    bool changed = false;
    for (Eigen::Index i = 0; i < r; ++i) {
      double excl = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < r; ++k) {
        if (k == i) continue;
        for (Eigen::Index l = k + 1; l < r; ++l) {
          if (l == i) continue;
          excl = std::min(excl, d2(k, l));
        }
      }
      for (int j = 0; j < d; ++j) {
        // stratum bounds written as s/r, the same expression that defines
        // the Latin property; the index from floor(p*r) is corrected against
        // those exact boundaries (p*r can round across them)
        const double rs = static_cast<double>(r);
        const double current = pts(i, j);
        auto stratum = static_cast<Eigen::Index>(std::floor(current * rs));
        stratum = std::min(std::max<Eigen::Index>(stratum, 0), r - 1);
        if (current < static_cast<double>(stratum) / rs) --stratum;
        if (current >= static_cast<double>(stratum + 1) / rs) ++stratum;
        const double lo = static_cast<double>(stratum) / rs;
        const double hi = static_cast<double>(stratum + 1) / rs - width * 1e-9;
        double best_pos = current;
        double best_val = -std::numeric_limits<double>::infinity();
        for (double cand : {lo, lo + 0.25 * width, lo + 0.5 * width, lo + 0.75 * width, hi,
                            current}) {
          pts(i, j) = cand;
          double row_min = std::numeric_limits<double>::infinity();
          for (Eigen::Index k = 0; k < r; ++k) {
            if (k != i) row_min = std::min(row_min, (pts.row(i) - pts.row(k)).squaredNorm());
          }
          const double val = std::min(excl, row_min);
          if (val > best_val) {
            best_val = val;
            best_pos = cand;
          }
        }
        if (best_pos != current) changed = true;
        pts(i, j) = best_pos;
      }
      for (Eigen::Index k = 0; k < r; ++k) {
        if (k != i) d2(i, k) = d2(k, i) = (pts.row(i) - pts.row(k)).squaredNorm();
      }
    }
    if (!changed) break;
  }
}

}  // namespace detail

/// Latin hypercube sample locally optimized for the maximin interpoint
/// distance via random restarts and pairwise coordinate exchange.
/// Deterministic given seed; the result is never worse than the best
/// unoptimized start.
inline Design maximin_lhs(int d, Eigen::Index r, std::uint64_t seed, int restarts = 4) {
  if (d < 1) throw DimensionError("maximin_lhs: need d >= 1");
  if (r < 2) throw DimensionError("maximin_lhs: need r >= 2");
  if (restarts < 1) restarts = 1;
  Matrix best;
  double best_d2 = -1.0;
  for (int t = 0; t < restarts; ++t) {
    Rng rng(Rng::child_seed(seed, static_cast<std::uint64_t>(t)));
    Matrix pts = detail::random_lhs(d, r, rng);
    detail::maximin_exchange(pts, rng);
    detail::maximin_within_cell(pts);
    detail::maximin_exchange(pts, rng);
    detail::maximin_within_cell(pts);
    const double m = detail::min_pairwise_sq(pts);
    if (m > best_d2) {
      best_d2 = m;
      best = std::move(pts);
    }
  }
  Design out;
  out.kind = DesignKind::MaximinLhs;
  out.points = std::move(best);
  return out;
}

/// CSV with header x1,...,xd, one point per row, round-trip precision.
inline void write_design_csv(const Design& design, std::ostream& os) {
  const int d = static_cast<int>(design.dim());
  for (int j = 0; j < d; ++j) os << (j ? ",x" : "x") << (j + 1);
  os << "\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < design.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      if (j) os << ",";
      os << design.points(i, j);
    }
    os << "\n";
  }
}

inline void write_design_csv(const Design& design, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ResourceError("cannot open " + path + " for writing");
  write_design_csv(design, os);
}

inline Design read_design_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("design csv: empty file");
  Design out;
  out.kind = DesignKind::Explicit;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError("design csv: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("design csv: no data rows");
  out.points.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < out.points.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.points.cols(); ++j) {
      out.points(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

}  // namespace exset
