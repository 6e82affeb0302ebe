#include "bmland/geometry.hpp"
#include "bmland/rng.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace bmland;

namespace {

FactorMatrix u1() { return FactorMatrix(oracle::to_matrix(oracle::kU1, 4, 2)); }
FactorMatrix u2() { return FactorMatrix(oracle::to_matrix(oracle::kU2, 4, 2)); }

FactorMatrix column(std::initializer_list<double> v) {
  Matrix m(static_cast<Index>(v.size()), 1);
  Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return FactorMatrix(m);
}

}  // namespace

TEST(Types, FactorMatrixRejectsBadInput) {
  EXPECT_THROW(FactorMatrix(Matrix(0, 2)), DimensionError);
  Matrix bad = Matrix::Ones(2, 2);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(FactorMatrix{bad}, InstanceError);
}

TEST(Types, LiftedMatrixChecksSymmetryAndPsd) {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_THROW(LiftedMatrix{a}, ContractError);
  Matrix s(2, 2);
  s << 1, 2, 2, 1;
  EXPECT_FALSE(LiftedMatrix(s).is_psd());
  EXPECT_TRUE(lift(u1()).is_psd());
  EXPECT_THROW(LiftedMatrix(Matrix(2, 3)), DimensionError);
}

TEST(Procrustes, MatchesFrozenOracle) {
  const ProcrustesResult pr = procrustes_align(u1(), u2());
  EXPECT_NEAR(pr.distance, oracle::kProcrustesDistance, 1e-12);
  EXPECT_NEAR(factor_distance(u1(), u2()), oracle::kProcrustesDistance, 1e-12);
  EXPECT_NEAR((pr.rotation.transpose() * pr.rotation - Matrix::Identity(2, 2)).norm(), 0.0, 1e-13);
}

TEST(Procrustes, MatchesGridSearchOnRandomPairs) {
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = gaussian_matrix(4, 2, rng), b = gaussian_matrix(4, 2, rng);
    EXPECT_NEAR(factor_distance(FactorMatrix(a), FactorMatrix(b)), oracle::procrustes_grid(a, b), 1e-9);
  }
}

TEST(Procrustes, AlignedProductIsSymmetricPsdAndNuclear) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const FactorMatrix a(gaussian_matrix(6, 3, rng)), b(gaussian_matrix(6, 3, rng));
    const ProcrustesResult pr = procrustes_align(a, b);
    const Matrix m = a.mat().transpose() * pr.aligned.mat();
    EXPECT_LE((m - m.transpose()).norm(), 1e-10 * (1 + m.norm()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(m));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    EXPECT_NEAR(inner(a.mat(), pr.aligned.mat()), nuclear_norm(a.mat().transpose() * b.mat()), 1e-8);
  }
}

TEST(Procrustes, OptimalAgainstRandomRotations) {
  Rng rng(8);
  const FactorMatrix a(gaussian_matrix(5, 3, rng)), b(gaussian_matrix(5, 3, rng));
  const double d = factor_distance(a, b);
  for (int t = 0; t < 100; ++t) {
    EXPECT_GE((a.mat() - b.mat() * random_orthogonal(3, rng)).norm(), d - 1e-10);
  }
}

TEST(Procrustes, PseudoMetric) {
  Rng rng(9);
  for (int t = 0; t < 30; ++t) {
    const FactorMatrix a(gaussian_matrix(5, 2, rng)), b(gaussian_matrix(5, 2, rng)),
        c(gaussian_matrix(5, 2, rng));
    EXPECT_NEAR(factor_distance(a, b), factor_distance(b, a), 1e-12);
    EXPECT_LE(factor_distance(a, c), factor_distance(a, b) + factor_distance(b, c) + 1e-8);
    const FactorMatrix rotated(a.mat() * random_orthogonal(2, rng));
    EXPECT_LE(factor_distance(a, rotated), 1e-10);
  }
  EXPECT_NEAR(factor_distance(column({1, 2}), column({-1, -2})), 0.0, 1e-15);
  EXPECT_THROW(factor_distance(column({1, 2}), column({1, 2, 3})), DimensionError);
}

TEST(Rank, NumericalRankAndSigmaAt) {
  Rng rng(3);
  const Matrix a = gaussian_matrix(4, 2, rng) * gaussian_matrix(2, 3, rng);
  EXPECT_EQ(numerical_rank(a), 2);
  const Vector sv = singular_values(a);
  EXPECT_DOUBLE_EQ(sigma_at(sv, 1), sv(0));
  EXPECT_EQ(sigma_at(sv, 0), 0.0);
  EXPECT_EQ(sigma_at(sv, 7), 0.0);
  EXPECT_EQ(numerical_rank(Matrix(Matrix::Zero(3, 2))), 0);
  // A tiny matrix is rank zero relative to a larger reference scale.
  EXPECT_EQ(numerical_rank(Matrix(1e-14 * Matrix::Identity(2, 2)), kDefaultRankTol, 1.0), 0);
}

TEST(RangeBasis, SpansRangeOfFactor) {
  Rng rng(4);
  const FactorMatrix u(gaussian_matrix(4, 2, rng) * gaussian_matrix(2, 3, rng));
  const Matrix q = range_basis(u);
  EXPECT_EQ(q.cols(), 2);
  EXPECT_LE((q.transpose() * q - Matrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LE((q * q.transpose() * u.mat() - u.mat()).norm(), 1e-10);
  EXPECT_EQ(range_basis(FactorMatrix::zeros(3, 2)).cols(), 0);
  const Matrix e1 = range_basis(column({1, 0, 0}));
  EXPECT_NEAR(std::abs(e1(0, 0)), 1.0, 1e-15);
  const Matrix id = range_basis(FactorMatrix(Matrix::Identity(3, 3)));
  EXPECT_LE((id * id.transpose() - Matrix::Identity(3, 3)).norm(), 1e-14);
}

TEST(LiftedDistance, FrozenOracleValues) {
  const InequalityReport rep = check_lifted_distance(u1(), u2());
  EXPECT_NEAR(rep.lhs, oracle::kLiftedDistanceBound, 1e-12);
  EXPECT_NEAR(rep.rhs, oracle::kLiftedDistance, 1e-12);
  // This pair lies outside the inequality: the bound exceeds the lifted distance.
  EXPECT_FALSE(rep.holds);
}

TEST(LiftedDistance, TwoByOneExample) {
  const FactorMatrix a = column({std::sqrt(2.0), 0}), b = column({0, 1});
  const InequalityReport rep = check_lifted_distance(a, b);
  EXPECT_NEAR(rep.lhs, (std::sqrt(2.0) + 1.0) * std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(rep.rhs, std::sqrt(5.0), 1e-14);
  // (sqrt2 + 1) sqrt3 = 4.18 > sqrt5 = 2.24: orthogonal ranges violate the bound.
  EXPECT_FALSE(rep.holds);
}

TEST(LiftedDistance, IdenticalFactors) {
  const InequalityReport rep = check_lifted_distance(u1(), u1());
  EXPECT_NEAR(rep.lhs, 0.0, 1e-12);
  EXPECT_NEAR(rep.rhs, 0.0, 1e-12);
  EXPECT_TRUE(rep.holds);
}

TEST(LiftedDistance, HoldsForNearbyParallelPerturbations) {
  // Scaling a factor moves along the equality case of the bound.
  const FactorMatrix a = column({1.0, 2.0, -1.0});
  const FactorMatrix b(1.1 * a.mat());
  const InequalityReport rep = check_lifted_distance(a, b);
  EXPECT_NEAR(rep.lhs, rep.rhs, 1e-12);
  EXPECT_TRUE(rep.holds);
}

TEST(FactorProduct, FrozenOracleValues) {
  const FactorMatrix aligned = procrustes_align(u1(), u2()).aligned;
  const InequalityReport rep = check_factor_product_bound(u1(), aligned);
  EXPECT_NEAR(rep.lhs, oracle::kFactorProductLhs, 1e-10);
  EXPECT_NEAR(rep.rhs, oracle::kFactorProductRhs, 1e-10);
  EXPECT_TRUE(rep.holds);
  const InequalityReport al = check_aligned_product_bound(u1(), aligned);
  EXPECT_NEAR(al.lhs, oracle::kFactorProductLhs, 1e-10);
  EXPECT_NEAR(al.rhs, oracle::kAlignedProductRhs, 1e-10);
  EXPECT_TRUE(al.holds);
}

TEST(FactorProduct, ScaledCopy) {
  Rng rng(12);
  const FactorMatrix u(gaussian_matrix(5, 2, rng));
  const FactorMatrix uhat(2.0 * u.mat());
  const Matrix x = u.mat() * u.mat().transpose();
  const InequalityReport rep = check_factor_product_bound(u, uhat);
  EXPECT_NEAR(rep.lhs, x.squaredNorm(), 1e-9 * x.squaredNorm());
  EXPECT_NEAR(rep.rhs, (9.0 / 8.0 + kProjectedTermCoef * 9.0) * x.squaredNorm(), 1e-9 * rep.rhs);
  EXPECT_TRUE(rep.holds);
}

TEST(FactorProduct, RejectsUnalignedPairs) {
  const FactorMatrix a = column({1, 0});
  const FactorMatrix b = column({-1, 0});
  EXPECT_THROW(check_factor_product_bound(a, b), ContractError);
  EXPECT_THROW(check_aligned_product_bound(a, b), ContractError);
}

TEST(AlignedProduct, ZeroComparisonFactor) {
  Rng rng(13);
  const FactorMatrix u(gaussian_matrix(4, 2, rng));
  const InequalityReport rep = check_aligned_product_bound(u, FactorMatrix::zeros(4, 2));
  const double x2 = (u.mat() * u.mat().transpose()).squaredNorm();
  EXPECT_NEAR(rep.lhs, x2, 1e-10 * x2);
  EXPECT_NEAR(rep.rhs, kAlignedProductCoef * x2, 1e-10 * x2);
  EXPECT_TRUE(rep.holds);
  EXPECT_NEAR(kAlignedProductCoef, 1.0 / (2.0 * (std::sqrt(2.0) - 1.0)), 1e-15);
}

TEST(AlignedProduct, RandomAlignedPairs) {
  Rng rng(14);
  for (int t = 0; t < 200; ++t) {
    const FactorMatrix a(gaussian_matrix(6, 3, rng)), b(gaussian_matrix(6, 3, rng));
    const FactorMatrix aligned = procrustes_align(a, b).aligned;
    EXPECT_TRUE(check_aligned_product_bound(a, aligned).holds);
    EXPECT_TRUE(check_factor_product_bound(a, aligned).holds);
  }
}

TEST(SqrtInner, FrozenOracleAndRandomPairs) {
  const InequalityReport rep = check_sqrt_inner_bound(u1(), u2());
  EXPECT_NEAR(rep.lhs, oracle::kSqrtInner, 1e-10);
  EXPECT_NEAR(rep.rhs, oracle::kNuclearU1tU2, 1e-10);
  EXPECT_TRUE(rep.holds);
  Rng rng(15);
  for (int t = 0; t < 200; ++t) {
    const FactorMatrix a(gaussian_matrix(5, 2, rng)), b(gaussian_matrix(5, 2, rng));
    EXPECT_TRUE(check_sqrt_inner_bound(a, b).holds);
  }
}

TEST(PsdSqrt, SquaresBack) {
  const Matrix x = lift(u1()).mat();
  const Matrix s = psd_sqrt(x);
  EXPECT_LE((s * s - x).norm(), 1e-12 * x.norm());
  EXPECT_LE((s - s.transpose()).norm(), 1e-14);
}

TEST(Report, SlackAndMargin) {
  const InequalityReport r = make_report(1.0 + 1e-12, 1.0);
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(make_report(1.0 + 1e-6, 1.0).holds);
  EXPECT_NEAR(make_report(1.0, 3.0).margin(), 2.0, 1e-15);
}
