#pragma once

#include "bmland/types.hpp"

#include <functional>

namespace bmland {

/// A self-adjoint linear map on R^dim given by its action.
using LinearOperator = std::function<Vector(const Vector&)>;

struct ExtremeEig {
  double value = 0.0;
  Vector vector;
  double residual = 0.0;  // ||A v - value v||
  bool converged = false;
  int iterations = 0;
};

enum class Extreme { smallest, largest };

/// Lanczos with full reorthogonalization. Stops when the Ritz residual of the
/// requested extreme pair is <= tol * max(1, |spectrum estimate|), on an
/// invariant Krylov subspace, or after max_iter steps.
ExtremeEig lanczos_extreme(const LinearOperator& op, Index dim, const Vector& start, int max_iter,
                           double tol, Extreme which);

/// Dense matrix of the operator, symmetrized.
Matrix materialize(const LinearOperator& op, Index dim);

/// Eigenvalues ascending.
Vector symmetric_eigenvalues(const Matrix& a);

double min_eigenvalue(const Matrix& a);

}  // namespace bmland
