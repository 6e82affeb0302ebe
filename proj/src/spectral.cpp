#include "bmland/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace bmland {

ExtremeEig lanczos_extreme(const LinearOperator& op, Index dim, const Vector& start, int max_iter,
                           double tol, Extreme which) {
  ExtremeEig out;
  if (dim == 0) {
    out.converged = true;
    return out;
  }
  const int steps = static_cast<int>(std::min<Index>(dim, std::max(1, max_iter)));
  Matrix basis(dim, steps);
  Vector alpha(steps);
  Vector beta(steps);

  Vector v = start;
  double nrm = v.norm();
  if (nrm == 0.0) {
    v = Vector::Ones(dim);
    nrm = v.norm();
  }
  basis.col(0) = v / nrm;

  Vector ritz_vec;
  for (int j = 0; j < steps; ++j) {
    Vector w = op(basis.col(j));
    alpha(j) = basis.col(j).dot(w);
    w -= alpha(j) * basis.col(j);
    if (j > 0) w -= beta(j - 1) * basis.col(j - 1);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      const auto q = basis.leftCols(j + 1);
      w -= q * (q.transpose() * w);
    }
    beta(j) = w.norm();

    const int k = j + 1;
    Eigen::SelfAdjointEigenSolver<Matrix> tri;
    Vector diag = alpha.head(k);
    Vector sub = beta.head(std::max(0, k - 1));
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Index pick = which == Extreme::smallest ? 0 : k - 1;
    const double theta = tri.eigenvalues()(pick);
    const double last = tri.eigenvectors()(k - 1, pick);
    const double scale =
        std::max({1.0, std::abs(tri.eigenvalues()(0)), std::abs(tri.eigenvalues()(k - 1))});
    const double ritz_residual = std::abs(beta(j) * last);
    const bool invariant = beta(j) <= 1e-14 * scale;

    out.value = theta;
    out.iterations = k;
    ritz_vec = basis.leftCols(k) * tri.eigenvectors().col(pick);

    if (invariant || ritz_residual <= tol * scale || k == steps) {
      out.converged = invariant || ritz_residual <= tol * scale;
      break;
    }
    basis.col(j + 1) = w / beta(j);
  }
  const double vn = ritz_vec.norm();
  if (vn > 0.0) ritz_vec /= vn;
  out.vector = ritz_vec;
  out.residual = (op(ritz_vec) - out.value * ritz_vec).norm();
  return out;
}

Matrix materialize(const LinearOperator& op, Index dim) {
  Matrix a(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    a.col(j) = op(Vector::Unit(dim, j));
  }
  return sym(a);
}

Vector symmetric_eigenvalues(const Matrix& a) {
  if (a.size() == 0) return Vector();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const Matrix& a) { return symmetric_eigenvalues(a)(0); }

}  // namespace bmland
