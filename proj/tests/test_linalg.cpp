#include <gtest/gtest.h>

#include "pslra/linalg.hpp"
#include "support/dense_oracle.hpp"
#include "support/generators.hpp"

using namespace pslra;

TEST(TruncatedSvd, ReconstructsBestRankApproximation)
{
  gen::Rng rng(1);
  const Matrix A = gen::normal_matrix(rng, 7, 5);
  const auto t = linalg::truncated_svd(A, 2);
  Eigen::JacobiSVD<Matrix> full(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector s = full.singularValues();
  const Matrix approx = t.U * t.S.asDiagonal() * t.V.transpose();
  EXPECT_NEAR((A - approx).squaredNorm(), s.tail(3).squaredNorm(), 1e-10);
  EXPECT_TRUE(t.S.isApprox(s.head(2)));
}

TEST(TruncatedSvd, SignConvention)
{
  gen::Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    const Matrix A = gen::normal_matrix(rng, 6, 4);
    const auto t = linalg::truncated_svd(A, 3);
    for (Index j = 0; j < 3; ++j) {
      Index arg = 0;
      t.U.col(j).cwiseAbs().maxCoeff(&arg);
      EXPECT_GE(t.U(arg, j), 0.0);
    }
  }
  // Ties go to the first index.
  Matrix B(2, 2);
  B << -1, 0, 1, 0;
  const auto t = linalg::truncated_svd(B, 1);
  EXPECT_GT(t.U(0, 0), 0.0);
}

TEST(NumericalRank, CountsAboveThreshold)
{
  gen::Rng rng(3);
  EXPECT_EQ(linalg::numerical_rank(gen::rank_k_matrix(rng, 8, 6, 3), 1e-10), 3);
  EXPECT_EQ(linalg::numerical_rank(Matrix::Zero(3, 3), 1e-10), 0);
}

TEST(LeastSquares, MatchesDenseSolver)
{
  gen::Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const Index cols = gen::uniform_int(rng, 1, 12);
    const Index rows = cols + gen::uniform_int(rng, 0, 10);
    Matrix A = gen::normal_matrix(rng, rows, cols);
    // Sparse banded rows exercise the envelope path.
    if (t % 2 == 0)
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
          if (std::abs(i % cols - j) > 2) A(i, j) = 0.0;
    const Vector b = gen::normal_vector(rng, rows);
    const Vector x = linalg::least_squares(A, b);
    const Vector ref = A.completeOrthogonalDecomposition().solve(b);
    // Compare optimality (residual norms) and, for full rank, the solutions.
    EXPECT_NEAR((A * x - b).norm(), (A * ref - b).norm(), 1e-9 * (1.0 + b.norm()));
    if (oracle::rank(A, 1e-8) == cols) EXPECT_LT((x - ref).norm(), 1e-8 * (1.0 + ref.norm()));
  }
}

TEST(LeastSquares, RankDeficientGivesMinimumNorm)
{
  Matrix A(3, 2);
  A << 1, 1, 1, 1, 1, 1;
  Vector b(3);
  b << 2, 2, 2;
  const Vector x = linalg::least_squares(A, b);
  EXPECT_NEAR(x(0), 1.0, 1e-12);
  EXPECT_NEAR(x(1), 1.0, 1e-12);
}

TEST(LeastSquares, UnderdeterminedGivesMinimumNorm)
{
  Matrix A(1, 3);
  A << 1, 2, 2;
  Vector b(1);
  b << 9;
  const Vector x = linalg::least_squares(A, b);
  EXPECT_TRUE(x.isApprox(Vector(A.transpose()), 1e-12));
}

TEST(LeastSquares, HeavyRowsFirst)
{
  // A badly scaled stack: the heavy block must be honoured almost exactly.
  gen::Rng rng(6);
  Matrix A(6, 3);
  A.topRows(2) = 1e7 * gen::normal_matrix(rng, 2, 3);
  A.bottomRows(4) = gen::normal_matrix(rng, 4, 3);
  const Vector b = gen::normal_vector(rng, 6);
  const Vector x = linalg::least_squares(A, b);
  const Vector ref = A.completeOrthogonalDecomposition().solve(b);
  EXPECT_LT((x - ref).norm(), 1e-8 * (1.0 + ref.norm()));
}
