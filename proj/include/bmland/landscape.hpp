#pragma once

// Critical points of g(U) = f(UU^T): construction, discovery and
// classification into global optima and strict saddles, with the curvature
// certificate along the direction to the nearest optimal factor.

#include "bmland/factored.hpp"
#include "bmland/geometry.hpp"
#include "bmland/solver_config.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace bmland {

/// Curvature constant of the strict-saddle certificate; valid for M/m <= 1.15.
inline constexpr double kSaddleCurvatureConstant = 0.074;
inline constexpr double kSupportedConditionNumber = 1.15;

enum class Classification { global_optimum, strict_saddle, indeterminate };

std::string_view to_string(Classification c);

struct KktResidual {
  double grad_min_eig = 0.0;    // lambda_min(grad f(X))
  double complementarity = 0.0; // ||grad f(X) X||_F
  double x_min_eig = 0.0;       // lambda_min(X)

  bool passes(double tol) const {
    return grad_min_eig >= -tol && complementarity <= tol && x_min_eig >= -tol;
  }
};

KktResidual kkt_residual(const Objective& obj, const LiftedMatrix& x);

/// U* padded with zero columns to width r (r >= current width).
FactorMatrix pad_columns(const FactorMatrix& u, Index r);

/// D = U - U* R with R the Procrustes rotation aligning U* to U. U* narrower
/// than U is zero-padded first.
FactorMatrix escape_direction(const FactorMatrix& u, const FactorMatrix& ustar);

enum class RankCase { below, equal, above };  // r' vs r*

std::string_view to_string(RankCase c);

struct TheoremBound {
  double value = 0.0;  // -0.074 m (sigma_k(U) + sigma_k(U*))^2 ||D||_F^2, k = max(r', r*)
  int r_prime = 0;
  int r_star = 0;
  double sigma_u = 0.0;
  double sigma_star = 0.0;
  double d_norm_sq = 0.0;
  RankCase rank_case = RankCase::equal;
  /// (sigma + sigma)^2 as given by the per-case simplification.
  double case_factor = 0.0;

  double sigma_factor() const { return (sigma_u + sigma_star) * (sigma_u + sigma_star); }
};

/// rank_tol is applied relative to max(sigma_1(U), sigma_1(U*)) so a
/// numerically-zero U has r' = 0.
TheoremBound theorem_bound(const FactorMatrix& u, const FactorMatrix& ustar, double m,
                           double rank_tol = kDefaultRankTol);

struct MinEigEstimate {
  double value = 0.0;
  FactorMatrix vector = FactorMatrix::zeros(1, 1);
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Dense eigensolve of the materialized operator (n*r <= 400 only).
  std::optional<double> dense_value;
  bool cross_check_ok = true;
};

inline constexpr Index kDenseCrossCheckLimit = 400;

/// Smallest eigenvalue of the Hessian of g at U by Lanczos on g_hess_apply.
MinEigEstimate min_eig_estimate(const FactoredProblem& p, const FactorMatrix& u, double tol = 1e-10,
                                int max_iter = 500, std::uint64_t seed = 0x6d696e656967ULL,
                                bool cross_check = true);

/// Terms of the curvature decomposition at a critical point X = UU^T:
///   pi1 = <grad f(X*) - grad f(X), X* - X>  (mean-value integral, 16-point Gauss-Legendre)
///   pi2 = <grad f(X*), X* - X>
///   pi3 = hess f(X)(DU^T, DU^T)
/// At a critical point, curvature along D = -2 pi1 + 2 pi2 + 4 pi3.
struct PiDiagnostics {
  double pi1 = 0.0;
  double pi2 = 0.0;
  double pi3 = 0.0;
  double lifted_gap_sq = 0.0;  // ||X* - X||_F^2
  double du_norm_sq = 0.0;     // ||DU^T||_F^2
};

PiDiagnostics pi_diagnostics(const Objective& obj, const FactorMatrix& u, const Matrix& xstar,
                             const FactorMatrix& d);

/// 1e-9 (1 + M ||U||_F^3)
double default_critical_tol(const FactorMatrix& u, double big_m);

struct ClassifyOptions {
  /// Relative tolerance of the global-optimum test and of KKT / eigenvalue signs.
  double tol = 1e-8;
  /// Gradient norm accepted as critical; <= 0 selects default_critical_tol.
  double tol_crit = 0.0;
  double rank_tol = kDefaultRankTol;
  /// Slack of the strict curvature inequality, relative to |bound|.
  double bound_slack_rel = 1e-8;
  bool compute_lambda_min = true;
};

struct CriticalPointReport {
  double grad_norm = 0.0;
  Classification classification = Classification::indeterminate;
  std::optional<FactorMatrix> escape_direction;
  double curvature_along_d = 0.0;
  std::optional<TheoremBound> bound;
  /// curvature_along_d < bound (within slack); false when no bound was computed.
  bool bound_holds = false;
  double lambda_min_estimate = 0.0;
  bool lambda_min_converged = false;
  int r_prime = 0;
  int r_star = 0;
  std::optional<PiDiagnostics> pi;
  KktResidual kkt;
  /// ||UU^T - X*||_F when X* is known.
  std::optional<double> lifted_error;
  /// False when the objective's known M/m exceeds 1.15.
  bool regime_supported = true;
};

/// Throws ContractError if ||grad g(U)|| exceeds the critical tolerance.
CriticalPointReport classify_critical_point(const FactoredProblem& p, const FactorMatrix& u,
                                            const std::optional<FactorMatrix>& ustar,
                                            const std::optional<double>& m,
                                            const ClassifyOptions& opts = {});

/// lhs = ||(UU^T - X*)QQ^T||_F, rhs = ((M-m)/(M+m)) ||UU^T - X*||_F, Q = range_basis(U).
/// Requires ||grad g(U)|| <= tol_crit (<= 0 selects the default). The slack is absolute.
InequalityReport check_lemma3(const FactoredProblem& p, const FactorMatrix& u, const Matrix& xstar,
                              double m, double big_m, double tol_crit = 0.0,
                              double slack_abs = 1e-7, double rank_tol = kDefaultRankTol);

/// Eigen-structure of a PSD target used by the closed-form PCA critical points.
struct PcaSpectrum {
  Matrix eigenvectors;  // n x r*, columns ordered by decreasing eigenvalue
  Vector eigenvalues;   // r*, positive, decreasing
};

PcaSpectrum pca_spectrum(const LiftedMatrix& xstar, double rank_tol = kDefaultRankTol);

/// U* = Q [diag(sqrt(lambda)) 0], n x r. Requires r >= r*.
FactorMatrix pca_optimal_factor(const LiftedMatrix& xstar, Index r,
                                double rank_tol = kDefaultRankTol);

/// U = Q [diag(sqrt(lambda .* s)) 0] V^T with V a seeded random orthogonal
/// r x r matrix. Every such U is a critical point of the PCA objective and
/// UU^T = sum_j lambda_j s_j q_j q_j^T.
FactorMatrix construct_pca_saddle(const LiftedMatrix& xstar, Index r,
                                  const std::vector<int>& selector, std::uint64_t seed,
                                  double rank_tol = kDefaultRankTol);

enum class CriticalSearchMethod {
  gradient,      // backtracking gradient descent on h
  gauss_newton,  // Levenberg-Marquardt on grad g = 0 with the dense Hessian
};

struct CriticalSearchConfig {
  /// gauss_newton falls back to gradient when n*r exceeds kDenseCrossCheckLimit.
  CriticalSearchMethod method = CriticalSearchMethod::gauss_newton;
  double tol_crit = 1e-10;
  int max_iters = 50000;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 80;
};

struct CriticalSearchResult {
  FactorMatrix u;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

/// Minimizes h(U) = 1/2 ||grad g(U)||^2, using grad h(U) = g_hess_apply(U, grad g(U)).
/// The gauss_newton steps solve (H^2 + mu I) d = -H grad g and are accepted only
/// when h decreases; large mu turns them into short gradient steps on h.
/// Non-convergence is reported through `converged`, not thrown.
CriticalSearchResult find_critical_point(const FactoredProblem& p, const FactorMatrix& u0,
                                         const CriticalSearchConfig& cfg = {});

struct Proposition1Report {
  int trials = 0;
  int succeeded = 0;
  std::vector<Matrix> optima;       // lifted solutions
  std::vector<std::uint64_t> seeds;
  double max_pairwise_distance = 0.0;
  bool unique = false;
  /// Some solve did not reach a certified minimum.
  bool indeterminate = false;
};

/// Independent perturbed gradient descent runs from random starts; the
/// minimizer of rank <= r is unique when all lifted solutions agree within
/// tol * (1 + max ||X_i||).
Proposition1Report verify_proposition1(const ObjectivePtr& obj, Index r, int trials,
                                       const SolverConfig& cfg, double tol = 1e-6);

}  // namespace bmland
