// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <limits>

#include "oracles.hpp"
#include "tsica/eigen_duality.hpp"
#include "tsica/error.hpp"

namespace tsica {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

double sign_aligned_error(const VectorXd& a, const VectorXd& b) {
  return std::min((a - b).norm(), (a + b).norm());
}

TEST(CenterColumns, SubtractsMeans) {
  MatrixXd x(2, 2);
  x << 1, 2, 3, 4;
  const CenteredMatrix c = center_columns(x, false);
  MatrixXd expected(2, 2);
  expected << -1, -1, 1, 1;
  EXPECT_TRUE(c.values.isApprox(expected));
  EXPECT_DOUBLE_EQ(c.column_means(0), 2.0);
  EXPECT_DOUBLE_EQ(c.column_means(1), 3.0);
  EXPECT_EQ(c.column_scales, VectorXd::Ones(2));
}

TEST(CenterColumns, IdempotentOnCenteredInput) {
  const MatrixXd x = center_columns(testing::seeded_gaussian(6, 4, 1), false).values;
  const CenteredMatrix again = center_columns(x, false);
  EXPECT_LT((again.values - x).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CenterColumns, ConstantColumnBecomesFlaggedZero) {
  MatrixXd x(3, 2);
  x << 1, 5, 2, 5, 4, 5;
  const CenteredMatrix c = center_columns(x, true);
  EXPECT_EQ(c.constant_columns, (std::vector<std::uint8_t>{0, 1}));
  EXPECT_EQ(c.values.col(1), VectorXd::Zero(3));
  EXPECT_DOUBLE_EQ(c.column_scales(1), 1.0);
  EXPECT_EQ(c.constant_count(), 1u);
}

TEST(CenterColumns, AllConstantIsDegenerate) {
  MatrixXd x = MatrixXd::Constant(4, 3, 2.0);
  EXPECT_EQ(code_of([&] { center_columns(x, false); }), ErrorCode::degenerate_input);
}

TEST(CenterColumns, StandardizeGivesUnitPopulationVariance) {
  const CenteredMatrix c = center_columns(testing::seeded_gaussian(50, 5, 2) * 3.0, true);
  for (Eigen::Index j = 0; j < 5; ++j) {
    EXPECT_NEAR(c.values.col(j).sum(), 0.0, 1e-12);
    EXPECT_NEAR(c.values.col(j).squaredNorm() / 50.0, 1.0, 1e-12);
  }
}

TEST(CenterColumns, RejectsNonFiniteAndTinyInput) {
  MatrixXd x = MatrixXd::Ones(3, 2);
  x(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(code_of([&] { center_columns(x, false); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { center_columns(MatrixXd::Ones(1, 3), false); }), ErrorCode::invalid_argument);
}

TEST(GramEigens, DiagonalCase) {
  MatrixXd x(2, 3);
  x << 1, 0, 0, 0, 2, 0;
  const GramEigens g = gram_eigens(x);
  EXPECT_DOUBLE_EQ(g.squared_singular_values(0), 4.0);
  EXPECT_DOUBLE_EQ(g.squared_singular_values(1), 1.0);
  EXPECT_NEAR(std::abs(g.vectors(1, 0)), 1.0, 1e-15);
}

TEST(GramEigens, RankOneHasSingleEigenvalueEqualToFrobenius) {
  const VectorXd u = testing::seeded_gaussian(6, 1, 3).col(0);
  const VectorXd v = testing::seeded_gaussian(40, 1, 4).col(0);
  const MatrixXd x = u * v.transpose();
  const GramEigens g = gram_eigens(x);
  EXPECT_NEAR(g.squared_singular_values(0), x.squaredNorm(), 1e-10 * x.squaredNorm());
  EXPECT_LT(g.squared_singular_values.tail(5).cwiseAbs().maxCoeff(), 1e-10 * x.squaredNorm());
}

TEST(GramEigens, MatchesIndependentDenseSolver) {
  const MatrixXd x = testing::seeded_gaussian(10, 500, 5);
  const GramEigens g = gram_eigens(x);
  const MatrixXd gram = x * x.transpose();
  Eigen::EigenSolver<MatrixXd> general(gram);  // non-symmetric solver as the oracle
  std::vector<double> oracle;
  for (Eigen::Index k = 0; k < 10; ++k) oracle.push_back(general.eigenvalues()(k).real());
  std::sort(oracle.rbegin(), oracle.rend());
  for (Eigen::Index k = 0; k < 10; ++k)
    EXPECT_NEAR(g.squared_singular_values(k), oracle[static_cast<std::size_t>(k)], 1e-10 * oracle[0]);
  for (Eigen::Index k = 0; k < 10; ++k) {
    const VectorXd residual = gram * g.vectors.col(k) - g.squared_singular_values(k) * g.vectors.col(k);
    EXPECT_LT(residual.norm(), 1e-10 * oracle[0]);
  }
}

TEST(GramEigens, SignConventionIsLargestCoordinatePositive) {
  const GramEigens g = gram_eigens(testing::seeded_gaussian(8, 100, 6));
  for (Eigen::Index k = 0; k < g.vectors.cols(); ++k) {
    Eigen::Index idx;
    g.vectors.col(k).cwiseAbs().maxCoeff(&idx);
    EXPECT_GT(g.vectors(idx, k), 0.0);
  }
}

TEST(GramEigens, RowCapEnforced) {
  EXPECT_EQ(code_of([] { gram_eigens(MatrixXd::Ones(5, 10), 4); }), ErrorCode::invalid_argument);
}

TEST(LiftEigenvectors, SatisfiesCovarianceEigenEquation) {
  const MatrixXd x = center_columns(testing::seeded_gaussian(9, 700, 7), false).values;
  const DualEigens d = lift_eigenvectors(x, gram_eigens(x));
  ASSERT_EQ(d.rank(), 8);
  for (Eigen::Index k = 0; k < d.rank(); ++k) {
    const double d2 = d.eigenvalues(k) * 9.0;
    const VectorXd f = d.lifted_vectors.col(k);
    const VectorXd residual = x.transpose() * (x * f) - d2 * f;
    EXPECT_LE(residual.norm(), 1e-8 * d2);
    EXPECT_NEAR(f.norm(), 1.0, 1e-8);
  }
  const MatrixXd gram = d.lifted_vectors.transpose() * d.lifted_vectors;
  EXPECT_LT((gram - MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(LiftEigenvectors, MatchesBruteForce2000Covariance) {
  const MatrixXd x = center_columns(testing::seeded_gaussian(10, 2000, 8), false).values;
  const DualEigens dual = lift_eigenvectors(x, gram_eigens(x));
  const testing::DenseEigens brute = testing::full_covariance_eigens(x);
  ASSERT_EQ(dual.rank(), 9);
  for (Eigen::Index k = 0; k < dual.rank(); ++k) {
    EXPECT_NEAR(dual.eigenvalues(k), brute.values(k), 1e-8 * brute.values(k));
    EXPECT_LT(sign_aligned_error(dual.lifted_vectors.col(k), brute.vectors.col(k)), 1e-8);
  }
}

TEST(LiftEigenvectors, IdenticalRowsLoseRank) {
  MatrixXd x = testing::seeded_gaussian(6, 300, 9);
  x.row(3) = x.row(1);
  const MatrixXd c = center_columns(x, false).values;
  const DualEigens d = lift_eigenvectors(c, gram_eigens(c));
  EXPECT_EQ(d.rank(), 4);
  EXPECT_EQ(d.dropped, 2u);
}

TEST(LiftEigenvectors, ZeroMatrixIsRankDeficient) {
  const MatrixXd x = MatrixXd::Zero(4, 20);
  EXPECT_EQ(code_of([&] { lift_eigenvectors(x, gram_eigens(x)); }), ErrorCode::rank_deficient);
}

TEST(LiftEigenvectors, MaxVectorsLimitsLiftingOnly) {
  const MatrixXd x = center_columns(testing::seeded_gaussian(7, 200, 10), false).values;
  const DualEigens d = lift_eigenvectors(x, gram_eigens(x), kDefaultRankTolerance, 2);
  EXPECT_EQ(d.rank(), 6);
  EXPECT_EQ(d.lifted_vectors.cols(), 2);
}

TEST(Duality, SumRuleMatchesTotalVariance) {
  const MatrixXd x = center_columns(testing::seeded_gaussian(11, 900, 11), false).values;
  const DualEigens d = lift_eigenvectors(x, gram_eigens(x));
  const double total = x.squaredNorm() / 11.0;
  EXPECT_NEAR(d.eigenvalues.sum(), total, 1e-8 * total);
}

TEST(Duality, DirectAndDualPathsAgree) {
  const MatrixXd x = center_columns(testing::seeded_gaussian(12, 30, 12), false).values;
  const DualEigens dual = lift_eigenvectors(x, gram_eigens(x));
  const DualEigens direct = covariance_eigens(x.leftCols(30));  // 30 cols > 12 rows: dual again
  EXPECT_TRUE(direct.dual_path);
  const MatrixXd tall = x.transpose();  // 30 x 12: direct path
  const DualEigens small = covariance_eigens(tall);
  EXPECT_FALSE(small.dual_path);
  // Same nonzero spectrum up to the n normalization of each layout.
  for (Eigen::Index k = 0; k < dual.rank(); ++k)
    EXPECT_NEAR(dual.eigenvalues(k) * 12.0, small.eigenvalues(k) * 30.0, 1e-9 * dual.eigenvalues(0) * 12.0);
}

TEST(SelectComponentCount, KaiserRule) {
  VectorXd e(4);
  e << 3.2, 1.5, 0.9, 0.1;
  EXPECT_EQ(select_component_count(e, ComponentCountMode::auto_rule()), 2u);
}

TEST(SelectComponentCount, NoEigenvalueAboveOne) {
  VectorXd e(3);
  e << 1.0, 0.999, 0.998;
  EXPECT_EQ(code_of([&] { select_component_count(e, ComponentCountMode::auto_rule()); }), ErrorCode::no_component);
  EXPECT_EQ(select_component_count(e, ComponentCountMode::fixed_count(3)), 3u);
}

TEST(SelectComponentCount, FixedCappedByNonzeroCount) {
  VectorXd e(5);
  e << 4, 3, 2, 0, 0;
  EXPECT_EQ(select_component_count(e, ComponentCountMode::fixed_count(10)), 3u);
  EXPECT_EQ(code_of([&] { select_component_count(e, ComponentCountMode::fixed_count(0)); }),
            ErrorCode::invalid_argument);
}

TEST(KaiserSpectrum, OrientationIndependent) {
  const MatrixXd x = testing::seeded_gaussian(15, 400, 13);
  const VectorXd temporal = kaiser_spectrum(x, Orientation::temporal);
  const VectorXd spatial = kaiser_spectrum(x.transpose(), Orientation::spatial);
  EXPECT_LT((temporal - spatial).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(temporal.sum(), 15.0, 1e-9);  // trace of the standardized Gram over v
}

TEST(KaiserSpectrum, IgnoresConstantVoxels) {
  MatrixXd x = testing::seeded_gaussian(10, 50, 14);
  MatrixXd padded(10, 60);
  padded << x, MatrixXd::Constant(10, 10, 3.0);
  EXPECT_LT((kaiser_spectrum(x, Orientation::temporal) - kaiser_spectrum(padded, Orientation::temporal))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(ReduceAndWhiten, WhitenessHolds) {
  for (const auto& shape : {std::pair<int, int>{12, 800}, std::pair<int, int>{500, 9}}) {
    const MatrixXd x = center_columns(testing::seeded_gaussian(shape.first, shape.second, 15), false).values;
    const Whitening w = reduce_and_whiten(x, 5);
    const MatrixXd cov = w.white.z * w.white.z.transpose() / static_cast<double>(shape.first);
    EXPECT_LT((cov - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-6);
    const MatrixXd basis = w.basis.vectors.transpose() * w.basis.vectors;
    EXPECT_LT((basis - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_GT(w.basis.eigenvalues.minCoeff(), 0.0);
  }
}

TEST(ReduceAndWhiten, HandComputedTwoVariableCase) {
  // Columns with variances 4 and 1, uncorrelated: eigenvectors are the axes,
  // so Z rows are the columns divided by their standard deviations.
  MatrixXd x(4, 2);
  x << 2, 1, -2, 1, 2, -1, -2, -1;
  const Whitening w = reduce_and_whiten(x, 2);
  EXPECT_NEAR(w.basis.eigenvalues(0), 4.0, 1e-12);
  EXPECT_NEAR(w.basis.eigenvalues(1), 1.0, 1e-12);
  EXPECT_TRUE(w.white.z.row(0).transpose().isApprox(x.col(0) / 2.0, 1e-12));
  EXPECT_TRUE(w.white.z.row(1).transpose().isApprox(x.col(1), 1e-12));
}

TEST(ReduceAndWhiten, TooManyComponentsIsRankDeficient) {
  const MatrixXd x = center_columns(testing::seeded_gaussian(5, 100, 16), false).values;
  EXPECT_EQ(code_of([&] { reduce_and_whiten(x, 5); }), ErrorCode::rank_deficient);
}

TEST(ReduceAndWhiten, DeterministicOutput) {
  const MatrixXd x = center_columns(testing::seeded_gaussian(8, 300, 17), false).values;
  const Whitening a = reduce_and_whiten(x, 4);
  const Whitening b = reduce_and_whiten(x, 4);
  EXPECT_EQ(a.white.z, b.white.z);
  EXPECT_EQ(a.basis.vectors, b.basis.vectors);
}

}  // namespace
}  // namespace tsica
