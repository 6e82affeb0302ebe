#pragma once

#include <cstdint>

namespace bmland {

struct SolverConfig {
  /// Initial (backtracking) or constant (fixed_step) step size.
  double step_size = 1.0;
  bool fixed_step = false;
  double shrink = 0.5;
  /// Sufficient-decrease constant of the Armijo test.
  double armijo = 1e-4;
  int max_backtracks = 60;
  int max_iters = 20000;
  double grad_tol = 1e-10;
  /// Perturbation radius relative to (1 + ||U||_F).
  double perturb_radius = 1e-3;
  int perturb_patience = 50;
  int max_perturbations = 200;
  /// lambda_min below -neg_curv_tol marks a point as a saddle.
  double neg_curv_tol = 1e-8;
  /// Random-init scale; <= 0 selects (||grad f(0)||_F)^(1/4).
  double init_scale = 0.0;
  std::uint64_t seed = 0;

  /// Throws ContractError on out-of-range fields.
  void validate() const;
};

}  // namespace bmland
