#include "bmland/objectives.hpp"
#include "bmland/rng.hpp"
#include "bmland/spectral.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace bmland;

namespace {

Matrix x1() {
  const Matrix u = oracle::to_matrix(oracle::kU1, 4, 2);
  return u * u.transpose();
}
Matrix x2() {
  const Matrix u = oracle::to_matrix(oracle::kU2, 4, 2);
  return u * u.transpose();
}

Matrix random_sym(Index n, Rng& rng) { return sym(gaussian_matrix(n, n, rng)); }

void expect_derivatives_match_fd(const Objective& obj, Rng& rng, int points) {
  const Index n = obj.dim();
  for (int t = 0; t < points; ++t) {
    const Matrix x = random_sym(n, rng);
    const Matrix g = random_sym(n, rng), h = random_sym(n, rng);
    const oracle::ScalarFn f = [&](const Matrix& y) { return obj.value(y); };
    const Matrix fd = oracle::central_gradient(f, x, 1e-6);
    EXPECT_LE(oracle::rel_err(obj.gradient(x), fd), 1e-7) << obj.name();
    // Directional derivative of the gradient against the Hessian action.
    const double step = 1e-6;
    const Matrix dg = (obj.gradient(x + step * g) - obj.gradient(x - step * g)) / (2 * step);
    EXPECT_LE(oracle::rel_err(obj.hess_apply(x, g), sym(dg)), 1e-7) << obj.name();
    const Matrix w = obj.hess_apply(x, g);
    EXPECT_LE((w - w.transpose()).norm(), 1e-12 * (1 + w.norm()));
    EXPECT_NEAR(obj.hess_bilinear(x, g, h), inner(w, h), 1e-10 * (1 + w.norm() * h.norm()));
    EXPECT_NEAR(obj.hess_bilinear(x, g, h), obj.hess_bilinear(x, h, g), 1e-10 * (1 + w.norm() * h.norm()));
  }
}

}  // namespace

TEST(Pca, MatchesFrozenOracle) {
  const PcaObjective obj{LiftedMatrix(x2())};
  EXPECT_NEAR(obj.value(x1()), oracle::kPcaG, 1e-12);
  EXPECT_LE((obj.gradient(x1()) - oracle::to_matrix(oracle::kPcaFGrad, 4, 4)).norm(), 1e-12);
  const Matrix g = x1() - x2();
  EXPECT_NEAR(obj.hess_bilinear(x1(), g, g), g.squaredNorm(), 1e-12);
  ASSERT_TRUE(obj.known_spectrum());
  EXPECT_EQ(obj.known_spectrum()->m, 1.0);
  EXPECT_EQ(obj.known_spectrum()->big_m, 1.0);
}

TEST(Pca, SeesOnlySymmetricPart) {
  const PcaObjective obj{LiftedMatrix(x2())};
  Matrix a = Matrix::Zero(4, 4);
  a(0, 1) = 1.0;
  a(1, 0) = -1.0;
  EXPECT_NEAR(obj.value(x1() + a), obj.value(x1()), 1e-12);
  EXPECT_NEAR(obj.hess_bilinear(x1(), a, a), 0.0, 1e-15);
}

TEST(Logistic, MatchesFrozenOracle) {
  const auto obj = LogisticPca::create(oracle::to_matrix(oracle::kSigns, 4, 4), oracle::kRidge);
  EXPECT_LE((obj->gradient(x1()) - oracle::to_matrix(oracle::kLogisticFGrad, 4, 4)).norm(), 1e-12);
  EXPECT_FALSE(obj->known_minimizer());
}

TEST(Logistic, RejectsBadSigns) {
  Matrix y = Matrix::Ones(3, 3);
  y(0, 1) = 0.5;
  EXPECT_THROW(LogisticPca::create(y, 0.1), ContractError);
  y(0, 1) = -1.0;
  EXPECT_THROW(LogisticPca::create(y, 0.1), ContractError);  // not symmetric
  EXPECT_THROW(LogisticPca::create(Matrix::Ones(2, 3), 0.1), DimensionError);
  EXPECT_THROW(LogisticPca::create(Matrix::Ones(2, 2), -1.0), ContractError);
}

TEST(Logistic, StableForLargeArguments) {
  const auto obj = LogisticPca::create(Matrix::Ones(2, 2), 0.0);
  const Matrix big = 1e4 * Matrix::Ones(2, 2);
  EXPECT_TRUE(std::isfinite(obj->value(-big)));
  EXPECT_TRUE(obj->gradient(-big).allFinite());
  EXPECT_NEAR(obj->value(big), 0.0, 1e-12);
}

TEST(VecSym, IsometryAndInverse) {
  Rng rng(2);
  const Matrix a = random_sym(5, rng), b = random_sym(5, rng);
  EXPECT_NEAR(vec_sym(a).dot(vec_sym(b)), inner(a, b), 1e-12);
  EXPECT_LE((unvec_sym(vec_sym(a), 5) - a).norm(), 1e-14);
  EXPECT_EQ(vec_sym(a).size(), 15);
}

TEST(ConditionedQuadratic, SpectrumIsExactlyPinned) {
  Rng rng(1);
  const PlantedTarget t = plant_low_rank_target(5, 2, rng);
  const auto obj = ConditionedQuadratic::create(t.x, 1.0, 1.1, 42);
  Eigen::SelfAdjointEigenSolver<Matrix> es(obj->operator_matrix());
  EXPECT_NEAR(es.eigenvalues().minCoeff(), 1.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues().maxCoeff(), 1.1, 1e-12);
  EXPECT_NEAR(obj->value(t.x.mat()), 0.0, 1e-20);
  EXPECT_LE(obj->gradient(t.x.mat()).norm(), 1e-14);
  EXPECT_NEAR(obj->known_spectrum()->delta(), 0.1 / 2.1, 1e-15);
  EXPECT_THROW(ConditionedQuadratic::create(t.x, 2.0, 1.0, 1), ContractError);
}

TEST(ConditionedQuadratic, SameSeedSameOperator) {
  Rng rng(1);
  const PlantedTarget t = plant_low_rank_target(4, 1, rng);
  const auto a = ConditionedQuadratic::create(t.x, 1.0, 1.15, 9);
  const auto b = ConditionedQuadratic::create(t.x, 1.0, 1.15, 9);
  EXPECT_EQ((a->operator_matrix() - b->operator_matrix()).norm(), 0.0);
}

TEST(GaussianSensing, AdjointAndObservations) {
  Rng rng(3);
  const PlantedTarget t = plant_low_rank_target(4, 2, rng);
  const auto obj = GaussianSensing::create(t.x, 30, 5);
  EXPECT_EQ(obj->measurements(), 30);
  for (Index i = 0; i < 30; ++i) {
    const Matrix a = obj->sensing_matrix(i);
    EXPECT_LE((a - a.transpose()).norm(), 1e-15);
    EXPECT_NEAR(inner(a, t.x.mat()), obj->observations()(i), 1e-12);
  }
  EXPECT_NEAR(obj->value(t.x.mat()), 0.0, 1e-20);
  // f(X) = 1/2 sum (<A_i, X> - b_i)^2 evaluated directly.
  const Matrix x = random_sym(4, rng);
  double direct = 0.0;
  for (Index i = 0; i < 30; ++i) {
    const double res = inner(obj->sensing_matrix(i), x) - obj->observations()(i);
    direct += 0.5 * res * res;
  }
  EXPECT_NEAR(obj->value(x), direct, 1e-10 * (1 + direct));
}

TEST(Objectives, DerivativesMatchFiniteDifferences) {
  Rng rng(77);
  const PlantedTarget t = plant_low_rank_target(5, 2, rng);
  expect_derivatives_match_fd(PcaObjective(t.x), rng, 5);
  expect_derivatives_match_fd(*ConditionedQuadratic::create(t.x, 1.0, 1.1, 4), rng, 5);
  expect_derivatives_match_fd(*GaussianSensing::create(t.x, 40, 6), rng, 5);
  Matrix y = t.x.mat().unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
  expect_derivatives_match_fd(*LogisticPca::create(y, 0.2), rng, 5);
}

TEST(Objectives, RejectNonSquareInput) {
  const PcaObjective obj{LiftedMatrix(x2())};
  EXPECT_THROW(obj.value(Matrix::Zero(3, 3)), DimensionError);
  EXPECT_THROW(obj.gradient(Matrix::Zero(4, 3)), DimensionError);
}

TEST(PlantedTarget, RankAndEigenvalueRange) {
  Rng rng(6);
  const PlantedTarget t = plant_low_rank_target(6, 3, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> es(t.x.mat());
  EXPECT_NEAR(es.eigenvalues()(2), 0.0, 1e-12);
  EXPECT_GE(es.eigenvalues()(3), 1.0 - 1e-12);
  EXPECT_LE(es.eigenvalues()(5), 3.0 + 1e-12);
  EXPECT_LE((t.factor.mat() * t.factor.mat().transpose() - t.x.mat()).norm(), 1e-12);
}

TEST(RscEstimate, PcaIsExactlyOne) {
  Rng rng(7);
  const PlantedTarget t = plant_low_rank_target(6, 2, rng);
  const PcaObjective obj(t.x);
  const RscRssEstimate est = estimate_rsc_rss(obj, 2, 5, 2, rng);
  EXPECT_NEAR(est.m_hat, 1.0, 1e-9);
  EXPECT_NEAR(est.big_m_hat, 1.0, 1e-9);
}

TEST(RscEstimate, ConditionedQuadraticInsideKnownInterval) {
  Rng rng(8);
  const PlantedTarget t = plant_low_rank_target(5, 1, rng);
  const auto obj = ConditionedQuadratic::create(t.x, 1.0, 1.15, 3);
  const RscRssEstimate est = estimate_rsc_rss(*obj, 1, 5, 2, rng);
  EXPECT_GE(est.m_hat, 1.0 - 1e-9);
  EXPECT_LE(est.big_m_hat, 1.15 + 1e-9);
  EXPECT_GT(est.ratio(), 1.0);
}

TEST(RipHat, HoldsForConditionedQuadratic) {
  Rng rng(9);
  const PlantedTarget t = plant_low_rank_target(5, 1, rng);
  const auto obj = ConditionedQuadratic::create(t.x, 1.0, 1.1, 3);
  for (int k = 0; k < 50; ++k) {
    const Matrix v = gaussian_matrix(5, 2, rng);
    const Matrix g = random_sym(5, rng), h = random_sym(5, rng);
    EXPECT_LE(check_rip_hat(*obj, v * v.transpose(), g, h, 1.0, 1.1, 2), 1e-12);
  }
}

TEST(Spectral, LanczosFindsExtremes) {
  Rng rng(10);
  const Matrix a = random_sym(30, rng);
  const LinearOperator op = [&](const Vector& v) { return Vector(a * v); };
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const ExtremeEig lo = lanczos_extreme(op, 30, gaussian_matrix(30, 1, rng), 100, 1e-12, Extreme::smallest);
  const ExtremeEig hi = lanczos_extreme(op, 30, gaussian_matrix(30, 1, rng), 100, 1e-12, Extreme::largest);
  EXPECT_TRUE(lo.converged);
  EXPECT_NEAR(lo.value, es.eigenvalues()(0), 1e-10);
  EXPECT_NEAR(hi.value, es.eigenvalues()(29), 1e-10);
  EXPECT_NEAR(min_eigenvalue(a), es.eigenvalues()(0), 1e-12);
}
