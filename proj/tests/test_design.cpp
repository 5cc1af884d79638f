#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "exset/design.hpp"
#include "support/sobol_golden.hpp"

using namespace exset;

TEST(Sobol, MatchesReferenceGenerator) {
  for (const auto& block : golden::sobol_reference()) {
    const Design d = sobol(block.dim, static_cast<Eigen::Index>(block.pts.size()), 0);
    for (std::size_t i = 0; i < block.pts.size(); ++i) {
      for (int j = 0; j < block.dim; ++j) {
        ASSERT_EQ(d.points(static_cast<Eigen::Index>(i), j), block.pts[i][static_cast<std::size_t>(j)])
            << "dim=" << block.dim << " point=" << i << " coord=" << j;
      }
    }
  }
}

TEST(Sobol, SkipConvention) {
  // first point of the sequence is the origin; skip shifts the window
  const Design zero = sobol(2, 1, 0);
  EXPECT_EQ(zero.points(0, 0), 0.0);
  EXPECT_EQ(zero.points(0, 1), 0.0);

  const Design d = sobol(1, 3, 1);
  EXPECT_EQ(d.points(0, 0), 0.5);
  EXPECT_EQ(d.points(1, 0), 0.75);
  EXPECT_EQ(d.points(2, 0), 0.25);

  // skipping is the same as dropping a prefix
  const Design all = sobol(3, 40, 0);
  const Design tail = sobol(3, 30, 10);
  for (Eigen::Index i = 0; i < 30; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(tail.points(i, j), all.points(i + 10, j));
  }
}

TEST(Sobol, ReproducibleAndInRange) {
  const Design a = sobol(6, 500, 7);
  const Design b = sobol(6, 500, 7);
  EXPECT_TRUE((a.points.array() == b.points.array()).all());
  EXPECT_TRUE((a.points.array() >= 0.0).all());
  EXPECT_TRUE((a.points.array() < 1.0).all());
}

TEST(Sobol, RejectsUnsupportedDimension) {
  EXPECT_THROW(sobol(0, 4, 0), DimensionError);
  EXPECT_THROW(sobol(22, 4, 0), DimensionError);
}

TEST(Sobol, FillsSpaceBetterThanPseudoRandom) {
  // nearest-neighbor spacing statistic: low-discrepancy points keep their
  // closest pairs farther apart than iid uniforms of the same size
  const int d = 6;
  const Eigen::Index r = 10000;
  const Design s = sobol(d, r, 1);
  Rng rng(123);
  Matrix u(r, d);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (int j = 0; j < d; ++j) u(i, j) = rng.uniform();
  }
  auto min_nn = [](const Matrix& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < pts.rows(); ++j) {
        best = std::min(best, (pts.row(i) - pts.row(j)).squaredNorm());
      }
    }
    return std::sqrt(best);
  };
  EXPECT_GT(min_nn(s.points), min_nn(u));
}

TEST(MaximinLhs, LatinPropertyExact) {
  const Eigen::Index r = 23;
  const Design d = maximin_lhs(3, r, 42);
  for (int j = 0; j < 3; ++j) {
    std::vector<double> col(d.points.col(j).data(), d.points.col(j).data() + r);
    std::sort(col.begin(), col.end());
    for (Eigen::Index i = 0; i < r; ++i) {
      EXPECT_GE(col[static_cast<std::size_t>(i)], static_cast<double>(i) / r);
      EXPECT_LT(col[static_cast<std::size_t>(i)], static_cast<double>(i + 1) / r);
    }
  }
}

TEST(MaximinLhs, OneDimStrata) {
  const Design d = maximin_lhs(1, 4, 9);
  std::vector<double> v(d.points.col(0).data(), d.points.col(0).data() + 4);
  std::sort(v.begin(), v.end());
  EXPECT_LT(v[0], 0.25);
  EXPECT_GE(v[1], 0.25);
  EXPECT_LT(v[1], 0.5);
  EXPECT_GE(v[2], 0.5);
  EXPECT_LT(v[2], 0.75);
  EXPECT_GE(v[3], 0.75);
}

TEST(MaximinLhs, NeverWorseThanUnoptimizedStart) {
  // the optimizer only accepts improving exchanges, so the optimized design
  // beats a plain random LHS drawn from the same seed
  const Eigen::Index r = 20;
  Rng rng(Rng::child_seed(1, 0));
  Matrix start = detail::random_lhs(2, r, rng);
  const Design opt = maximin_lhs(2, r, 1, 1);
  EXPECT_GE(detail::min_pairwise_sq(opt.points), detail::min_pairwise_sq(start));
}

TEST(MaximinLhs, NearBruteForceOptimum) {
  // d=2, r=5: compare against the best of 1e5 random LHS draws
  const Design opt = maximin_lhs(2, 5, 3, 50);
  const double opt_dist = std::sqrt(detail::min_pairwise_sq(opt.points));
  double best = 0.0;
  Rng rng(777);
  for (int t = 0; t < 100000; ++t) {
    Matrix pts = detail::random_lhs(2, 5, rng);
    best = std::max(best, detail::min_pairwise_sq(pts));
  }
  EXPECT_GE(opt_dist, 0.9 * std::sqrt(best));
}

TEST(MaximinLhs, DeterministicGivenSeed) {
  const Design a = maximin_lhs(2, 16, 5, 2);
  const Design b = maximin_lhs(2, 16, 5, 2);
  EXPECT_TRUE((a.points.array() == b.points.array()).all());
}

TEST(Grid, CellCenteredCoordinates) {
  const Design g = grid(1, 2);
  ASSERT_EQ(g.size(), 2);
  EXPECT_DOUBLE_EQ(g.points(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(g.points(1, 0), 0.75);

  EXPECT_EQ(grid(2, 50).size(), 2500);
  EXPECT_EQ(grid(2, 80).size(), 6400);
}

TEST(Grid, IndexRoundTrip) {
  const int q = 7, d = 3;
  const Design g = grid(d, q);
  for (Eigen::Index k = 0; k < g.size(); k += 13) {
    const auto multi = grid_multi_index(q, d, k);
    EXPECT_EQ(grid_index(q, multi), k);
    for (int j = 0; j < d; ++j) {
      EXPECT_DOUBLE_EQ(g.points(k, j), (multi[static_cast<std::size_t>(j)] + 0.5) / q);
    }
  }
}

TEST(Grid, CapEnforced) {
  EXPECT_THROW(grid(6, 50), ResourceError);
  EXPECT_THROW(grid(2, 1), DimensionError);
}

TEST(DesignCsv, RoundTrip) {
  const Design d = sobol(3, 17, 5);
  std::stringstream ss;
  write_design_csv(d, ss);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "x1,x2,x3");
  ss.seekg(0);
  const Design back = read_design_csv(ss);
  ASSERT_EQ(back.size(), d.size());
  ASSERT_EQ(back.dim(), d.dim());
  EXPECT_TRUE((back.points.array() == d.points.array()).all());
}

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
