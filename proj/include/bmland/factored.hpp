#pragma once

// The factored problem g(U) = f(UU^T) with its exact chain-rule derivatives.
// The gradient convention is the full chain rule, grad g(U) = 2 sym(grad f(X)) U.

#include "bmland/objectives.hpp"
#include "bmland/spectral.hpp"
#include "bmland/types.hpp"

namespace bmland {

class FactoredProblem {
 public:
  /// Requires 1 <= r <= n.
  FactoredProblem(ObjectivePtr objective, Index r);

  const Objective& objective() const { return *objective_; }
  const ObjectivePtr& objective_ptr() const { return objective_; }
  Index n() const { return objective_->dim(); }
  Index r() const { return r_; }

  /// Throws DimensionError unless U is n x r.
  void check_factor(const FactorMatrix& u, const char* what) const;

 private:
  ObjectivePtr objective_;
  Index r_;
};

double g_value(const FactoredProblem& p, const FactorMatrix& u);

FactorMatrix g_gradient(const FactoredProblem& p, const FactorMatrix& u);

/// Exact second derivative:
///   <grad f(X), D1 D2^T + D2 D1^T> + hess f(X)(U D1^T + D1 U^T, U D2^T + D2 U^T).
double g_hess_bilinear(const FactoredProblem& p, const FactorMatrix& u, const FactorMatrix& d1,
                       const FactorMatrix& d2);

/// The two pieces of the quadratic form along D in the
/// 2<grad f(X), DD^T> + 4 hess f(X)(DU^T, DU^T) form. Their sum equals
/// g_hess_bilinear(U, D, D) whenever the objective only sees symmetric parts.
struct HessianSplit {
  double gradient_term = 0.0;   // 2 <grad f(X), DD^T>
  double curvature_term = 0.0;  // 4 hess f(X)(DU^T, DU^T), >= 0 for convex f

  double total() const { return gradient_term + curvature_term; }
};

HessianSplit g_hess_split(const FactoredProblem& p, const FactorMatrix& u, const FactorMatrix& d);

/// W with <W, D'> = g_hess_bilinear(U, D, D') for all D'.
FactorMatrix g_hess_apply(const FactoredProblem& p, const FactorMatrix& u, const FactorMatrix& d);

/// g_hess_apply as an operator on column-major vec(D), length n*r.
LinearOperator hessian_operator(const FactoredProblem& p, const FactorMatrix& u);

/// 1e-5 * (1 + ||U||_F)
double default_gradient_step(const FactorMatrix& u);
/// 1e-4 * (1 + ||U||_F); second differences need a larger step than first.
double default_curvature_step(const FactorMatrix& u);

/// Central differences of g_value, entry by entry. Test oracle.
Matrix fd_gradient(const FactoredProblem& p, const FactorMatrix& u, double h = 0.0);

/// (g(U + hD) - 2 g(U) + g(U - hD)) / h^2. Test oracle.
double fd_hess_bilinear(const FactoredProblem& p, const FactorMatrix& u, const FactorMatrix& d,
                        double h = 0.0);

}  // namespace bmland
