#include "bmland/landscape.hpp"
#include "bmland/solvers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bmland;

namespace {

LiftedMatrix origin_target() {
  Matrix x = Matrix::Zero(3, 3);
  x(0, 0) = 2.0;
  return LiftedMatrix(x);
}

}  // namespace

TEST(Config, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.step_size = 0.0;
  EXPECT_THROW(c.validate(), ContractError);
  c = {};
  c.shrink = 1.0;
  EXPECT_THROW(c.validate(), ContractError);
  c = {};
  c.grad_tol = 0.0;
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(RandomInit, ScaleAndDeterminism) {
  Rng rng(1);
  double total = 0.0;
  for (int k = 0; k < 1000; ++k) total += random_init(10, 3, 2.0, rng).mat().squaredNorm();
  EXPECT_NEAR(total / 1000.0, 4.0 * 3.0, 0.1 * 12.0);
  Rng a(5), b(5);
  EXPECT_EQ((random_init(4, 2, 1.0, a).mat() - random_init(4, 2, 1.0, b).mat()).norm(), 0.0);
  EXPECT_THROW(random_init(4, 2, 0.0, a), ContractError);
}

TEST(GradientDescent, StartAtGlobalFactor) {
  const LiftedMatrix xs = origin_target();
  const FactoredProblem p(std::make_shared<PcaObjective>(xs), 1);
  const FactorMatrix u = pca_optimal_factor(xs, 1);
  const SolverResult res = gradient_descent(p, u, SolverConfig{});
  EXPECT_TRUE(res.success());
  EXPECT_LE(res.iterations, 1);
}

TEST(GradientDescent, StallsAtExactSaddle) {
  const FactoredProblem p(std::make_shared<PcaObjective>(origin_target()), 1);
  const SolverResult res = gradient_descent(p, FactorMatrix::zeros(3, 1), SolverConfig{});
  EXPECT_EQ(res.status, SolverStatus::converged);
  EXPECT_EQ(res.u.norm(), 0.0);
}

TEST(GradientDescent, MonotoneAndRecoversPca) {
  Rng rng(2);
  const PlantedTarget t = plant_low_rank_target(6, 2, rng);
  const FactoredProblem p(std::make_shared<PcaObjective>(t.x), 2);
  int ok = 0;
  for (int k = 0; k < 100; ++k) {
    Rng init(derive_seed(9, k));
    SolverConfig cfg;
    cfg.max_iters = 5000;
    const SolverResult res = gradient_descent(p, random_init(6, 2, 1.0, init), cfg, t.x.mat());
    for (std::size_t i = 1; i < res.trace.records.size(); ++i) {
      EXPECT_LE(res.trace.records[i].g_value, res.trace.records[i - 1].g_value);
    }
    if ((lift(res.u).mat() - t.x.mat()).norm() <= 1e-6 * t.x.mat().norm()) ++ok;
  }
  EXPECT_GE(ok, 95);
}

TEST(GradientDescent, FixedStepMode) {
  Rng rng(3);
  const PlantedTarget t = plant_low_rank_target(5, 1, rng);
  const FactoredProblem p(std::make_shared<PcaObjective>(t.x), 1);
  const FactorMatrix u0 = random_init(5, 1, 1.0, rng);
  SolverConfig cfg;
  cfg.fixed_step = true;
  cfg.step_size = 0.05;
  cfg.max_iters = 20000;
  const SolverResult res = gradient_descent(p, u0, cfg);
  EXPECT_TRUE(res.success());
  EXPECT_NEAR(fixed_step_size(FactorMatrix(Matrix::Identity(2, 1)), 2.0), 1.0 / 8.0, 1e-15);
  EXPECT_THROW(fixed_step_size(FactorMatrix::zeros(2, 1), 1.0), ContractError);
}

TEST(GradientDescent, DivergenceCarriesTrace) {
  const FactoredProblem p(std::make_shared<PcaObjective>(origin_target()), 1);
  SolverConfig cfg;
  cfg.fixed_step = true;
  cfg.step_size = 10.0;
  Matrix u0(3, 1);
  u0 << 3, 1, 1;
  try {
    gradient_descent(p, FactorMatrix(u0), cfg);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_FALSE(e.trace().records.empty());
  }
}

TEST(PerturbedGradientDescent, EscapesOriginSaddle) {
  const LiftedMatrix xs = origin_target();
  const FactoredProblem p(std::make_shared<PcaObjective>(xs), 1);
  const SolverResult res = perturbed_gradient_descent(p, FactorMatrix::zeros(3, 1), SolverConfig{}, xs.mat());
  EXPECT_TRUE(res.success());
  EXPECT_GE(res.perturbations, 1);
  EXPECT_LE((lift(res.u).mat() - xs.mat()).norm(), 1e-8);
  EXPECT_NEAR(std::abs(res.u.mat()(0, 0)), std::sqrt(2.0), 1e-8);
  int logged = 0;
  for (const TraceRecord& r : res.trace.records) logged += r.perturbed ? 1 : 0;
  EXPECT_EQ(logged, res.perturbations);
}

TEST(PerturbedGradientDescent, NoPerturbationAtGlobalFactor) {
  const LiftedMatrix xs = origin_target();
  const FactoredProblem p(std::make_shared<PcaObjective>(xs), 1);
  const SolverResult res = perturbed_gradient_descent(p, pca_optimal_factor(xs, 1), SolverConfig{});
  EXPECT_TRUE(res.success());
  EXPECT_EQ(res.perturbations, 0);
}

TEST(PerturbedGradientDescent, BudgetExhaustedAtSaddle) {
  const FactoredProblem p(std::make_shared<PcaObjective>(origin_target()), 1);
  SolverConfig cfg;
  cfg.max_perturbations = 0;
  const SolverResult res = perturbed_gradient_descent(p, FactorMatrix::zeros(3, 1), cfg);
  EXPECT_EQ(res.status, SolverStatus::suspected_saddle);
  EXPECT_LT(res.lambda_min, -1.0);
}

TEST(PerturbedGradientDescent, MonotoneBetweenPerturbations) {
  Rng rng(4);
  const PlantedTarget t = plant_low_rank_target(8, 2, rng);
  const FactoredProblem p(ConditionedQuadratic::create(t.x, 1.0, 1.1, 3), 2);
  const SolverResult res = perturbed_gradient_descent(p, FactorMatrix::zeros(8, 2), SolverConfig{}, t.x.mat());
  EXPECT_TRUE(res.success());
  for (std::size_t i = 1; i < res.trace.records.size(); ++i) {
    if (res.trace.records[i - 1].perturbed) continue;
    EXPECT_LE(res.trace.records[i].g_value, res.trace.records[i - 1].g_value);
  }
}

TEST(SolveToGlobal, SingleStartMatchesReplay) {
  Rng rng(5);
  const PlantedTarget t = plant_low_rank_target(5, 2, rng);
  const FactoredProblem p(std::make_shared<PcaObjective>(t.x), 2);
  SolverConfig cfg;
  cfg.seed = 77;
  const MultiStartResult one = solve_to_global(p, cfg, 1);
  const SolverResult replay = solve_start(p, cfg, 0);
  EXPECT_EQ((one.best.u.mat() - replay.u.mat()).norm(), 0.0);
  EXPECT_THROW(solve_to_global(p, cfg, 0), ContractError);
}

TEST(SolveToGlobal, PcaMatchesClosedFormAndIsJobInvariant) {
  Rng rng(6);
  const PlantedTarget t = plant_low_rank_target(6, 2, rng);
  const FactoredProblem p(std::make_shared<PcaObjective>(t.x), 2);
  SolverConfig cfg;
  cfg.seed = 3;
  const MultiStartResult a = solve_to_global(p, cfg, 6, t.x.mat(), 1);
  const MultiStartResult b = solve_to_global(p, cfg, 6, t.x.mat(), 3);
  EXPECT_TRUE(a.any_success);
  EXPECT_LE((lift(a.best.u).mat() - t.x.mat()).norm(), 1e-8);
  for (std::size_t k = 0; k < a.runs.size(); ++k) {
    EXPECT_EQ((a.runs[k].u.mat() - b.runs[k].u.mat()).norm(), 0.0);
  }
  // Start k does not depend on how many starts run before it.
  EXPECT_EQ((solve_start(p, cfg, 4, t.x.mat()).u.mat() - a.runs[4].u.mat()).norm(), 0.0);
}

TEST(Uniqueness, PcaAndConditionedQuadratic) {
  Rng rng(7);
  const PlantedTarget t = plant_low_rank_target(6, 2, rng);
  SolverConfig cfg;
  cfg.seed = 12;
  const Proposition1Report pca = verify_proposition1(std::make_shared<PcaObjective>(t.x), 2, 10, cfg, 1e-8);
  EXPECT_TRUE(pca.unique);
  EXPECT_LE(pca.max_pairwise_distance, 1e-8);
  const Proposition1Report cq = verify_proposition1(ConditionedQuadratic::create(t.x, 1.0, 1.1, 2), 2, 10, cfg);
  EXPECT_TRUE(cq.unique);
  EXPECT_FALSE(cq.indeterminate);
}
