#include <gtest/gtest.h>

#include "pslra/apps.hpp"
#include "pslra/diagnostics.hpp"
#include "support/dense_oracle.hpp"
#include "support/generators.hpp"
#include "support/properties.hpp"

using namespace pslra;
using namespace pslra::diagnostics;

namespace {

StructureSpec unstructured(Index m, Index n)
{
  StructureLayout layout{m, n, m * n, {}};
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) layout.entries.push_back(CellEntry::parameter(i, j, i + j * m));
  return StructureSpec(layout);
}

Factors random_factors(gen::Rng& rng, Index m, Index n, Index r)
{
  return {gen::normal_matrix(rng, m, r), gen::normal_matrix(rng, r, n)};
}

} // namespace

TEST(ConstraintVector, StructuredProductIsFeasible)
{
  // A rank-one Hankel matrix factors exactly: [1 2 4; 2 4 8] = [1; 2][1 2 4].
  const auto spec = hankel(2, 4);
  Factors f{Matrix::Constant(2, 1, 1.0), Matrix::Constant(1, 3, 1.0)};
  f.P(1, 0) = 2.0;
  f.L << 1, 2, 4;
  const auto cv = constraint_vector(spec, f);
  EXPECT_EQ(cv.c.size(), 6);
  EXPECT_EQ(cv.c_tilde.size(), 2);
  EXPECT_LT(cv.c.norm(), 1e-15);
  EXPECT_LT(cv.c_tilde.norm(), 1e-15);
}

TEST(ConstraintVector, InfeasibleProductIsDetected)
{
  const auto spec = hankel(2, 3);
  Matrix X(2, 2);
  X << 1, 2, 0, 3; // anti-diagonal entries 2 and 0 differ by 2
  const auto cv = constraint_vector(spec, {X, Matrix::Identity(2, 2)});
  EXPECT_NEAR(cv.c.norm(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(cv.c_tilde.norm(), std::sqrt(2.0), 1e-15);
}

TEST(ConstraintVector, MatchesDenseOracleOnHankel)
{
  gen::Rng rng(31);
  const auto spec = hankel(3, 6); // 3 x 4
  const auto d = oracle::dense(spec.layout());
  for (int t = 0; t < 20; ++t) {
    const auto f = random_factors(rng, 3, 4, 2);
    const auto cv = constraint_vector(spec, f);
    const Vector expected = oracle::perp(d) * (f.product().reshaped() - d.s0);
    EXPECT_LT((cv.c - expected).norm(), 1e-12 * (1.0 + expected.norm()));
    EXPECT_NEAR(cv.c.norm(), cv.c_tilde.norm(), 1e-12 * (1.0 + expected.norm()));
  }
}

TEST(ConstraintVector, UnstructuredHasNoConstraints)
{
  gen::Rng rng(32);
  const auto cv = constraint_vector(unstructured(3, 4), random_factors(rng, 3, 4, 2));
  EXPECT_EQ(cv.c.size(), 12);
  EXPECT_EQ(cv.c.norm(), 0.0);
  EXPECT_EQ(cv.c_tilde.size(), 0);
}

TEST(ConstraintVector, FeasibleIffProductInShiftedImage)
{
  gen::Rng rng(33);
  // Structured with a nonzero fixed cell: S(p) for random p factors as PL when r is full.
  StructureLayout layout{2, 2, 2, {}};
  layout.entries = {CellEntry::parameter(0, 0, 0), CellEntry::parameter(1, 1, 0), CellEntry::parameter(1, 0, 1),
                    CellEntry::fixed(0, 1, 3.0)};
  const StructureSpec spec(layout);
  for (int t = 0; t < 20; ++t) {
    const Matrix X = spec.evaluate(gen::normal_vector(rng, 2));
    const auto inside = constraint_vector(spec, {X, Matrix::Identity(2, 2)});
    EXPECT_LT(inside.c.norm(), 1e-14);
    Matrix Y = X;
    Y(0, 1) += 0.5; // leaves the shifted image
    const auto outside = constraint_vector(spec, {Y, Matrix::Identity(2, 2)});
    EXPECT_NEAR(outside.c.norm(), 0.5, 1e-14);
  }
}

TEST(Jacobian, FullRankFactorsGiveExpectedRank)
{
  gen::Rng rng(34);
  const auto f = random_factors(rng, 3, 3, 1);
  const Matrix J = factor_jacobian(f.P, f.L);
  EXPECT_EQ(J.rows(), 9);
  EXPECT_EQ(J.cols(), 6);
  EXPECT_EQ(jacobian_rank(J), 5);
  EXPECT_EQ(oracle::rank(J), 5);
}

TEST(Jacobian, ZeroLReducesRank)
{
  gen::Rng rng(35);
  const Matrix P = gen::normal_matrix(rng, 3, 1);
  const Matrix J = factor_jacobian(P, Matrix::Zero(1, 3));
  EXPECT_EQ(jacobian_rank(J), 3);
}

TEST(Jacobian, ConstraintJacobianMatchesOracle)
{
  gen::Rng rng(36);
  const auto spec = hankel(3, 6);
  const auto d = oracle::dense(spec.layout());
  const auto f = random_factors(rng, 3, 4, 2);
  const auto rep = constraint_jacobians(spec, f);
  const Matrix expected = oracle::constraint_jacobian(d, f.P, f.L);
  EXPECT_LT((rep.jacobian - expected).norm(), 1e-12 * expected.norm());
  EXPECT_EQ(rep.jacobian_tilde.rows(), 12 - 6);
  // Same row space up to an orthogonal change of coordinates.
  EXPECT_NEAR(rep.jacobian_tilde.norm(), rep.jacobian.norm(), 1e-12 * expected.norm());
  EXPECT_EQ(rep.rank, rep.rank_tilde);
  EXPECT_EQ(rep.factor_rank, 12 - (3 - 2) * (4 - 2));
}

TEST(Jacobian, UnstructuredHasEmptyTildeJacobian)
{
  gen::Rng rng(37);
  const auto rep = constraint_jacobians(unstructured(3, 3), random_factors(rng, 3, 3, 1));
  EXPECT_EQ(rep.jacobian_tilde.rows(), 0);
  EXPECT_EQ(rep.rank_tilde, 0);
}

TEST(Jacobian, TildeRankBoundedByConstraintsAndDegrees)
{
  gen::Rng rng(38);
  for (int t = 0; t < 100; ++t) {
    const auto layout = gen::random_layout(rng);
    const StructureSpec spec(layout);
    const Index m = spec.rows(), n = spec.cols();
    const Index r = gen::uniform_int(rng, 1, std::min(m, n));
    const auto rep = constraint_jacobians(spec, random_factors(rng, m, n, r));
    const Index bound = std::min(m * n - spec.num_params(), m * r + n * r - r * r);
    EXPECT_LE(rep.rank_tilde, bound);
  }
}

TEST(Jacobian, OversizedStructureIsRejected)
{
  const auto spec = hankel(101, 200); // 101 x 100 cells
  gen::Rng rng(39);
  EXPECT_THROW(constraint_jacobians(spec, random_factors(rng, 101, 100, 1)), DimensionError);
}

TEST(Regularity, WorkedHankelExample)
{
  const auto rep = regularity_check(5, 46, 54, 4);
  EXPECT_EQ(rep.constraints, 176);
  EXPECT_EQ(rep.degrees, 188);
  EXPECT_TRUE(rep.necessary_condition);
  EXPECT_FALSE(rep.constant_rank_regime.has_value());

  // The actual 5 x 46 Hankel structure has 50 parameters.
  const auto own = regularity_check(hankel(5, 50), 4);
  EXPECT_EQ(own.constraints, 180);
  EXPECT_EQ(own.degrees, 188);
  EXPECT_TRUE(own.necessary_condition);
}

TEST(Regularity, RankReductionByOneAlwaysHolds)
{
  for (Index m = 2; m <= 30; ++m)
    for (Index T = 2 * m - 1; T <= 2 * m + 40; ++T) {
      const auto spec = hankel(m, T);
      const auto rep = regularity_check(spec, std::min(spec.rows(), spec.cols()) - 1);
      EXPECT_TRUE(rep.necessary_condition) << "m = " << m << ", T = " << T;
    }
}

TEST(Regularity, SquareRankOneHankelFails)
{
  const auto rep = regularity_check(10, 10, 19, 1);
  EXPECT_EQ(rep.constraints, 81);
  EXPECT_EQ(rep.degrees, 19);
  EXPECT_FALSE(rep.necessary_condition);
  EXPECT_EQ(rep.multiplier_dimension, 81 - 19);
  EXPECT_EQ(regularity_check(hankel(10, 19), 1).constraints, 81);
}

TEST(Regularity, ConstantRankRegimeFlag)
{
  EXPECT_TRUE(*regularity_check(3, 3, 5, 1, 5).constant_rank_regime);
  EXPECT_FALSE(*regularity_check(3, 3, 5, 1, 4).constant_rank_regime);
}

TEST(Regularity, LargeDimensionsDoNotOverflow)
{
  const Index big = 3'000'000;
  const auto rep = regularity_check(big, big, 2 * big - 1, 1);
  EXPECT_EQ(rep.constraints, 9'000'000'000'000LL - 2 * big + 1);
  EXPECT_FALSE(rep.necessary_condition);
}

TEST(Stationarity, ZeroFactorsAreFeasible)
{
  StructureLayout layout{3, 3, 5, {}};
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) layout.entries.push_back(CellEntry::parameter(i, j, i + j));
  const StructureSpec spec(layout);
  const auto rep = stationarity_report(spec, {Matrix::Zero(3, 1), Matrix::Zero(1, 3)}, 1.0);
  EXPECT_EQ(rep.c_norm, 0.0);
  EXPECT_EQ(rep.classification, Stationarity::feasible);
  EXPECT_EQ(to_string(rep.classification), "feasible");
}

TEST(Stationarity, GradientMatchesClosedForm)
{
  gen::Rng rng(40);
  const auto spec = hankel(3, 6);
  const auto f = random_factors(rng, 3, 4, 2);
  const auto rep = stationarity_report(spec, f, 10.0);
  const Matrix C = spec.off_structure(f.product()).reshaped(3, 4);
  EXPECT_LT((rep.gradient_P - 2.0 * C * f.L.transpose()).norm(), 1e-12);
  EXPECT_LT((rep.gradient_L - 2.0 * f.P.transpose() * C).norm(), 1e-12);
  EXPECT_TRUE(rep.multiplier_estimate.isApprox(-10.0 * C.reshaped(), 1e-14));
  EXPECT_EQ(rep.classification, Stationarity::neither);
}

TEST(Stationarity, InfeasibleStationaryPointIsClassified)
{
  // With S0 != 0 the fixed cell cannot be met by P = 0, L = 0, and the gradient vanishes there.
  const StructureSpec spec(StructureLayout{1, 2, 1, {CellEntry::parameter(0, 0, 0), CellEntry::fixed(0, 1, 1.0)}});
  const auto rep = stationarity_report(spec, {Matrix::Zero(1, 1), Matrix::Zero(1, 2)}, 1.0);
  EXPECT_NEAR(rep.c_norm, 1.0, 1e-15);
  EXPECT_EQ(rep.gradient_norm, 0.0);
  EXPECT_EQ(rep.classification, Stationarity::infeasible_stationary);
  EXPECT_EQ(to_string(rep.classification), "infeasible-stationary");
}

TEST(Stationarity, ConvergedGcdRunIsFeasible)
{
  apps::PolySet set;
  Vector a(3), b(3), c(3);
  a << 5, -6, 1;
  b << 10.8, -7.4, 1;
  c << 15.6, -8.2, 1;
  set.polys = {a, b, c};
  const auto res = apps::gcd_approximate(set, SylvesterVariant::stacked);
  const auto spec = generalized_sylvester({2, 2, 2}, SylvesterVariant::stacked);
  const auto rep = stationarity_report(spec, res.factors, res.report.final_lambda);
  EXPECT_LT(rep.c_norm, 1e-8 * res.factors.product().norm());
  EXPECT_EQ(rep.classification, Stationarity::feasible);
}

TEST(Diagnose, BundlesEverything)
{
  const Vector y0 = apps::true_trajectory(50);
  const auto spec = hankel(5, 50);
  const auto [f, rep] = solve(spec, frobenius_weights(spec), y0, 4);
  const auto d = diagnose(spec, f, rep.final_lambda);
  EXPECT_EQ(d.c.size(), 230);
  EXPECT_EQ(d.c_tilde.size(), 180);
  ASSERT_TRUE(d.jacobian_tilde_rank.has_value());
  EXPECT_LE(*d.jacobian_tilde_rank, 180);
  EXPECT_EQ(d.rank_P, 4);
  EXPECT_EQ(d.rank_L, 4);
  EXPECT_TRUE(d.regularity.necessary_condition);
  EXPECT_EQ(d.stationarity.classification, Stationarity::feasible);
}

TEST(Diagnose, SkipsJacobiansForLargeStructures)
{
  const auto spec = hankel(60, 260); // 60 x 201
  gen::Rng rng(41);
  const auto d = diagnose(spec, random_factors(rng, 60, 201, 1), 1.0);
  EXPECT_FALSE(d.jacobian_rank.has_value());
  EXPECT_FALSE(d.jacobian_tilde_rank.has_value());
}

TEST(DiagnosticsProperty, NormEquality)
{
  const auto r = props::norm_equality(301);
  EXPECT_TRUE(r.ok()) << r.summary();
}

TEST(DiagnosticsProperty, RankFormula)
{
  const auto r = props::rank_formula(302);
  EXPECT_TRUE(r.ok()) << r.summary();
}

TEST(DiagnosticsProperty, StationarityImpliesFeasibility)
{
  const auto r = props::stationarity_feasibility(303);
  EXPECT_TRUE(r.ok()) << r.summary();
}

TEST(DiagnosticsProperty, FiniteDifferenceJacobian)
{
  const auto r = props::finite_difference_jacobian(304);
  EXPECT_TRUE(r.ok()) << r.summary();
}
