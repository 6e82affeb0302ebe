#include "bmland/objectives.hpp"

#include <cmath>
#include <sstream>

namespace bmland {
namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::shared_ptr<const LogisticPca> LogisticPca::create(Matrix signs, double ridge) {
  if (signs.rows() != signs.cols() || signs.rows() < 1) {
    throw DimensionError("LogisticPca: sign pattern must be square and non-empty");
  }
  if (!(ridge >= 0.0)) throw ContractError("LogisticPca: ridge must be >= 0");
  for (Index j = 0; j < signs.cols(); ++j) {
    for (Index i = 0; i < signs.rows(); ++i) {
      const double y = signs(i, j);
      if (y != 1.0 && y != -1.0) {
        std::ostringstream os;
        os << "LogisticPca: entry (" << i << "," << j << ") = " << y << " is not +-1";
        throw ContractError(os.str());
      }
      if (signs(j, i) != y) throw ContractError("LogisticPca: sign pattern must be symmetric");
    }
  }
  return std::shared_ptr<const LogisticPca>(new LogisticPca(std::move(signs), ridge));
}

LogisticPca::LogisticPca(Matrix signs, double ridge) : signs_(std::move(signs)), ridge_(ridge) {}

// Loss per entry: l(t) = log(1 + exp(-y t)), with l'(t) = -y s(-y t) and
// l''(t) = s(t) s(-t) for y = +-1. Each off-diagonal pair is counted once, and
// it depends on both X_ij and X_ji through the symmetric part, hence the 1/2
// factors on the off-diagonal gradient and Hessian entries.

double LogisticPca::value(const Matrix& x) const {
  check_square(x, "value");
  const Matrix s = sym(x);
  double total = 0.0;
  for (Index j = 0; j < s.cols(); ++j) {
    for (Index i = 0; i <= j; ++i) total += softplus(-signs_(i, j) * s(i, j));
  }
  return total + 0.5 * ridge_ * s.squaredNorm();
}

Matrix LogisticPca::gradient(const Matrix& x) const {
  check_square(x, "gradient");
  const Matrix s = sym(x);
  Matrix g = ridge_ * s;
  for (Index j = 0; j < s.cols(); ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double y = signs_(i, j);
      const double d = -y * sigmoid(-y * s(i, j));
      if (i == j) {
        g(i, i) += d;
      } else {
        g(i, j) += 0.5 * d;
        g(j, i) += 0.5 * d;
      }
    }
  }
  return g;
}

Matrix LogisticPca::hess_apply(const Matrix& x, const Matrix& g) const {
  check_square(x, "hess_apply");
  check_square(g, "hess_apply");
  const Matrix s = sym(x);
  const Matrix sg = sym(g);
  Matrix w = ridge_ * sg;
  for (Index j = 0; j < s.cols(); ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double curv = sigmoid(s(i, j)) * sigmoid(-s(i, j));
      if (i == j) {
        w(i, i) += curv * sg(i, i);
      } else {
        w(i, j) += 0.5 * curv * sg(i, j);
        w(j, i) += 0.5 * curv * sg(i, j);
      }
    }
  }
  return w;
}

}  // namespace bmland
