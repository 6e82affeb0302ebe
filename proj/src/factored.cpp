#include "bmland/factored.hpp"

#include "bmland/geometry.hpp"

#include <cmath>
#include <sstream>

namespace bmland {

FactoredProblem::FactoredProblem(ObjectivePtr objective, Index r)
    : objective_(std::move(objective)), r_(r) {
  if (!objective_) throw ContractError("FactoredProblem: null objective");
  if (r_ < 1 || r_ > objective_->dim()) {
    std::ostringstream os;
    os << "FactoredProblem: need 1 <= r <= n, got r=" << r_ << " n=" << objective_->dim();
    throw DimensionError(os.str());
  }
}

void FactoredProblem::check_factor(const FactorMatrix& u, const char* what) const {
  if (u.rows() != n() || u.cols() != r_) {
    std::ostringstream os;
    os << what << ": expected " << n() << "x" << r_ << " factor, got " << u.rows() << "x"
       << u.cols();
    throw DimensionError(os.str());
  }
}

namespace {

Matrix lifted(const Matrix& u) { return sym(u * u.transpose()); }

void check_finite(double v, const FactoredProblem& p, const char* what) {
  if (!std::isfinite(v)) {
    throw InstanceError(std::string(what) + ": non-finite value from " + p.objective().name());
  }
}

}  // namespace

double g_value(const FactoredProblem& p, const FactorMatrix& u) {
  p.check_factor(u, "g_value");
  const double v = p.objective().value(lifted(u.mat()));
  check_finite(v, p, "g_value");
  return v;
}

FactorMatrix g_gradient(const FactoredProblem& p, const FactorMatrix& u) {
  p.check_factor(u, "g_gradient");
  const Matrix grad_f = sym(p.objective().gradient(lifted(u.mat())));
  return FactorMatrix(2.0 * grad_f * u.mat());
}

double g_hess_bilinear(const FactoredProblem& p, const FactorMatrix& u, const FactorMatrix& d1,
                       const FactorMatrix& d2) {
  p.check_factor(u, "g_hess_bilinear");
  p.check_factor(d1, "g_hess_bilinear");
  p.check_factor(d2, "g_hess_bilinear");
  const Matrix& a = u.mat();
  const Matrix x = lifted(a);
  const Matrix grad_f = p.objective().gradient(x);
  const Matrix dd = d1.mat() * d2.mat().transpose();
  const Matrix e1 = a * d1.mat().transpose() + d1.mat() * a.transpose();
  const Matrix e2 = a * d2.mat().transpose() + d2.mat() * a.transpose();
  const double v = inner(grad_f, dd + dd.transpose()) + p.objective().hess_bilinear(x, e1, e2);
  check_finite(v, p, "g_hess_bilinear");
  return v;
}

HessianSplit g_hess_split(const FactoredProblem& p, const FactorMatrix& u, const FactorMatrix& d) {
  p.check_factor(u, "g_hess_split");
  p.check_factor(d, "g_hess_split");
  const Matrix x = lifted(u.mat());
  const Matrix du = d.mat() * u.mat().transpose();
  HessianSplit split;
  split.gradient_term = 2.0 * inner(p.objective().gradient(x), d.mat() * d.mat().transpose());
  split.curvature_term = 4.0 * p.objective().hess_bilinear(x, du, du);
  return split;
}

FactorMatrix g_hess_apply(const FactoredProblem& p, const FactorMatrix& u, const FactorMatrix& d) {
  p.check_factor(u, "g_hess_apply");
  p.check_factor(d, "g_hess_apply");
  const Matrix& a = u.mat();
  const Matrix x = lifted(a);
  const Matrix grad_f = sym(p.objective().gradient(x));
  const Matrix e = a * d.mat().transpose() + d.mat() * a.transpose();
  const Matrix s = sym(p.objective().hess_apply(x, e));
  return FactorMatrix(2.0 * grad_f * d.mat() + 2.0 * s * a);
}

LinearOperator hessian_operator(const FactoredProblem& p, const FactorMatrix& u) {
  p.check_factor(u, "hessian_operator");
  // Precompute the pieces that do not depend on the direction.
  const Matrix a = u.mat();
  const Matrix x = lifted(a);
  const Matrix grad_f = sym(p.objective().gradient(x));
  const Index n = p.n();
  const Index r = p.r();
  ObjectivePtr obj = p.objective_ptr();
  return [a, x, grad_f, n, r, obj](const Vector& v) {
    const Eigen::Map<const Matrix> d(v.data(), n, r);
    const Matrix e = a * d.transpose() + d * a.transpose();
    const Matrix s = sym(obj->hess_apply(x, e));
    const Matrix w = 2.0 * grad_f * d + 2.0 * s * a;
    return Vector(Eigen::Map<const Vector>(w.data(), n * r));
  };
}

double default_gradient_step(const FactorMatrix& u) { return 1e-5 * (1.0 + u.norm()); }
double default_curvature_step(const FactorMatrix& u) { return 1e-4 * (1.0 + u.norm()); }

Matrix fd_gradient(const FactoredProblem& p, const FactorMatrix& u, double h) {
  p.check_factor(u, "fd_gradient");
  if (h < 0.0) throw ContractError("fd_gradient: step must be positive");
  if (h == 0.0) h = default_gradient_step(u);
  Matrix grad(u.rows(), u.cols());
  Matrix probe = u.mat();
  for (Index j = 0; j < u.cols(); ++j) {
    for (Index i = 0; i < u.rows(); ++i) {
      const double saved = probe(i, j);
      probe(i, j) = saved + h;
      const double up = g_value(p, FactorMatrix(probe));
      probe(i, j) = saved - h;
      const double down = g_value(p, FactorMatrix(probe));
      probe(i, j) = saved;
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

double fd_hess_bilinear(const FactoredProblem& p, const FactorMatrix& u, const FactorMatrix& d,
                        double h) {
  p.check_factor(u, "fd_hess_bilinear");
  p.check_factor(d, "fd_hess_bilinear");
  if (h < 0.0) throw ContractError("fd_hess_bilinear: step must be positive");
  if (h == 0.0) h = default_curvature_step(u);
  const double up = g_value(p, FactorMatrix(u.mat() + h * d.mat()));
  const double mid = g_value(p, u);
  const double down = g_value(p, FactorMatrix(u.mat() - h * d.mat()));
  return (up - 2.0 * mid + down) / (h * h);
}

}  // namespace bmland
