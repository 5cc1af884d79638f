#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "exset/errors.hpp"

namespace exset {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cholesky of a symmetric PSD matrix with a jitter escalation ladder on the
/// diagonal: scale*{1e-8, 1e-6, 1e-4}, then a hard error. `scale` should be
/// the process variance so the jitter is dimensionally meaningful.
/// Returns the lower factor and stores the jitter actually used.
struct JitteredCholesky {
  Matrix lower;
  double jitter = 0.0;
};

inline JitteredCholesky cholesky_with_jitter(const Matrix& a, double scale) {
  static constexpr double kLadder[] = {1e-8, 1e-6, 1e-4};
  if (a.rows() != a.cols()) throw DimensionError("cholesky: matrix not square");
  for (double level : kLadder) {
    const double jitter = level * scale;
    Matrix work = a;
    work.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(work);
    if (llt.info() == Eigen::Success) {
      return {Matrix(llt.matrixL()), jitter};
    }
  }
  throw NumericError("cholesky: matrix not positive definite after jitter escalation");
}

/// Appends one row to a lower-triangular Cholesky factor L of K so the result
/// factors [[K, c], [c^T, kxx]]. Throws DegenerateUpdateError when the Schur
/// complement is not positive enough to extend.
inline void cholesky_append_row(Matrix& lower, const Vector& cross, double kxx,
                                double min_pivot) {
  const Eigen::Index m = lower.rows();
  if (cross.size() != m) throw DimensionError("cholesky_append_row: size mismatch");
  Matrix grown(m + 1, m + 1);
  grown.setZero();
  grown.topLeftCorner(m, m) = lower;
  if (m > 0) {
    grown.block(m, 0, 1, m) =
        lower.triangularView<Eigen::Lower>().solve(cross).transpose();
  }
  const double schur = kxx - grown.block(m, 0, 1, m).squaredNorm();
  if (schur < min_pivot) {
    throw DegenerateUpdateError("cholesky_append_row: conditional variance ~ 0 at new point");
  }
  grown(m, m) = std::sqrt(schur);
  lower = std::move(grown);
}

}  // namespace exset
