#include "bmland/objectives.hpp"
#include "bmland/simd/kernels.hpp"

#include <cmath>
#include <span>
#include <sstream>

namespace bmland {

Vector vec_sym(const Matrix& x) {
  const Index n = x.rows();
  Vector v(n * (n + 1) / 2);
  const double root2 = std::sqrt(2.0);
  Index k = 0;
  for (Index j = 0; j < n; ++j) {
    v(k++) = x(j, j);
    for (Index i = j + 1; i < n; ++i) v(k++) = root2 * 0.5 * (x(i, j) + x(j, i));
  }
  return v;
}

Matrix unvec_sym(const Vector& v, Index n) {
  if (v.size() != n * (n + 1) / 2) throw DimensionError("unvec_sym: length mismatch");
  Matrix x(n, n);
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  Index k = 0;
  for (Index j = 0; j < n; ++j) {
    x(j, j) = v(k++);
    for (Index i = j + 1; i < n; ++i) {
      x(i, j) = x(j, i) = inv_root2 * v(k++);
    }
  }
  return x;
}

std::shared_ptr<const ConditionedQuadratic> ConditionedQuadratic::create(LiftedMatrix target,
                                                                         double m, double big_m,
                                                                         std::uint64_t seed) {
  if (!(m > 0.0) || !(big_m >= m) || !std::isfinite(big_m)) {
    std::ostringstream os;
    os << "ConditionedQuadratic: need 0 < m <= M, got m=" << m << " M=" << big_m;
    throw ContractError(os.str());
  }
  const Index n = target.dim();
  const Index dim = n * (n + 1) / 2;
  Rng rng(seed);
  const Matrix basis = random_orthogonal(dim, rng);
  std::uniform_real_distribution<double> unif(m, big_m);
  Vector lambda(dim);
  for (Index i = 0; i < dim; ++i) lambda(i) = unif(rng);
  lambda(0) = m;
  if (dim > 1) lambda(dim - 1) = big_m;
  Matrix op = sym(basis * lambda.asDiagonal() * basis.transpose());
  return std::shared_ptr<const ConditionedQuadratic>(
      new ConditionedQuadratic(std::move(target), std::move(op), SpectrumBounds{m, big_m}));
}

ConditionedQuadratic::ConditionedQuadratic(LiftedMatrix target, Matrix op, SpectrumBounds bounds)
    : target_(std::move(target)), op_(std::move(op)), bounds_(bounds) {}

Vector ConditionedQuadratic::apply_op(const Vector& v) const {
  // op_ is symmetric, so its column-major storage is also its row-major storage.
  Vector out(v.size());
  const auto len = static_cast<std::size_t>(v.size());
  simd::gemv(std::span<const double>(op_.data(), len * len), len, len,
             std::span<const double>(v.data(), len), std::span<double>(out.data(), len));
  return out;
}

double ConditionedQuadratic::value(const Matrix& x) const {
  check_square(x, "value");
  const Vector v = vec_sym(x - target_.mat());
  return 0.5 * v.dot(apply_op(v));
}

Matrix ConditionedQuadratic::gradient(const Matrix& x) const {
  check_square(x, "gradient");
  return unvec_sym(apply_op(vec_sym(x - target_.mat())), dim());
}

Matrix ConditionedQuadratic::hess_apply(const Matrix& x, const Matrix& g) const {
  check_square(x, "hess_apply");
  check_square(g, "hess_apply");
  return unvec_sym(apply_op(vec_sym(g)), dim());
}

double ConditionedQuadratic::hess_bilinear(const Matrix& x, const Matrix& g,
                                           const Matrix& h) const {
  check_square(x, "hess_bilinear");
  check_square(g, "hess_bilinear");
  check_square(h, "hess_bilinear");
  return vec_sym(h).dot(apply_op(vec_sym(g)));
}

}  // namespace bmland
