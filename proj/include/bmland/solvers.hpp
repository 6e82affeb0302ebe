#pragma once

// Local search on g(U): backtracking / fixed-step gradient descent, perturbed
// gradient descent and multi-start solves.

#include "bmland/factored.hpp"
#include "bmland/rng.hpp"
#include "bmland/solver_config.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace bmland {

struct TraceRecord {
  int iteration = 0;
  double g_value = 0.0;
  double grad_norm = 0.0;
  /// ||UU^T - X*||_F, NaN when no target was supplied.
  double lifted_distance = 0.0;
  /// Step taken from this iterate (0 on the last record and on perturbations).
  double step = 0.0;
  /// The iterate was perturbed after this record.
  bool perturbed = false;
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  int perturbations = 0;
};

enum class SolverStatus {
  converged,         // gradient norm <= grad_tol (and no negative curvature for PGD)
  max_iters,         // budget exhausted away from a critical point
  stalled,           // no step satisfied the Armijo test
  suspected_saddle,  // budget exhausted at a point with negative curvature
  diverged,          // non-finite value; only appears in multi-start summaries
};

std::string_view to_string(SolverStatus s);

struct SolverResult {
  FactorMatrix u = FactorMatrix::zeros(1, 1);
  SolverStatus status = SolverStatus::max_iters;
  int iterations = 0;
  double g_value = 0.0;
  double grad_norm = 0.0;
  /// Last lambda_min estimate of the Hessian of g; NaN if never computed.
  double lambda_min = 0.0;
  int perturbations = 0;
  std::uint64_t seed = 0;
  SolverTrace trace;

  bool success() const { return status == SolverStatus::converged; }
};

class DivergenceError : public InstanceError {
 public:
  DivergenceError(const std::string& what, SolverTrace trace)
      : InstanceError(what), trace_(std::move(trace)) {}
  const SolverTrace& trace() const { return trace_; }

 private:
  SolverTrace trace_;
};

/// i.i.d. N(0, scale^2 / n) entries. Requires scale > 0.
FactorMatrix random_init(Index n, Index r, double scale, Rng& rng);

/// (||grad f(0)||_F)^(1/4), or 1 when that is zero. A magnitude heuristic.
double default_init_scale(const Objective& obj);

/// 1 / (4 M sigma_1(U0)^2). Requires sigma_1(U0) > 0 and M > 0.
double fixed_step_size(const FactorMatrix& u0, double big_m);

/// Armijo backtracking (or constant-step) gradient descent. Throws
/// DivergenceError on a non-finite value.
SolverResult gradient_descent(const FactoredProblem& p, const FactorMatrix& u0,
                              const SolverConfig& cfg,
                              const std::optional<Matrix>& xstar = std::nullopt);

/// Gradient descent that perturbs uniformly in a Frobenius ball when it sits
/// at a point with lambda_min < -neg_curv_tol, either at gradient norm <=
/// grad_tol or after perturb_patience iterations without progress.
SolverResult perturbed_gradient_descent(const FactoredProblem& p, const FactorMatrix& u0,
                                        const SolverConfig& cfg,
                                        const std::optional<Matrix>& xstar = std::nullopt);

struct MultiStartResult {
  /// Lowest g value among successful runs, or among all runs if none succeeded.
  SolverResult best;
  std::size_t best_index = 0;
  bool any_success = false;
  /// One entry per start, in start order.
  std::vector<SolverResult> runs;
};

/// Start k draws its init from derive_seed(cfg.seed, 0, k) and its
/// perturbations from derive_seed(cfg.seed, 1, k). Requires n_starts >= 1.
MultiStartResult solve_to_global(const FactoredProblem& p, const SolverConfig& cfg, int n_starts,
                                 const std::optional<Matrix>& xstar = std::nullopt, int jobs = 1);

/// The PGD run used for start k of solve_to_global, for replay in isolation.
SolverResult solve_start(const FactoredProblem& p, const SolverConfig& cfg, std::uint64_t k,
                         const std::optional<Matrix>& xstar = std::nullopt);

}  // namespace bmland
