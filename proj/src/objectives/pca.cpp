#include "bmland/objectives.hpp"

namespace bmland {

PcaObjective::PcaObjective(LiftedMatrix target) : target_(std::move(target)) {}

double PcaObjective::value(const Matrix& x) const {
  check_square(x, "value");
  return 0.5 * (sym(x) - target_.mat()).squaredNorm();
}

Matrix PcaObjective::gradient(const Matrix& x) const {
  check_square(x, "gradient");
  return sym(x) - target_.mat();
}

Matrix PcaObjective::hess_apply(const Matrix& x, const Matrix& g) const {
  check_square(x, "hess_apply");
  check_square(g, "hess_apply");
  return sym(g);
}

double PcaObjective::hess_bilinear(const Matrix& x, const Matrix& g, const Matrix& h) const {
  check_square(x, "hess_bilinear");
  check_square(g, "hess_bilinear");
  check_square(h, "hess_bilinear");
  return inner(sym(g), sym(h));
}

}  // namespace bmland
