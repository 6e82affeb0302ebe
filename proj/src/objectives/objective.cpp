#include "bmland/objectives.hpp"

#include <sstream>

namespace bmland {

double Objective::hess_bilinear(const Matrix& x, const Matrix& g, const Matrix& h) const {
  return inner(hess_apply(x, g), h);
}

void Objective::check_square(const Matrix& x, const char* what) const {
  if (x.rows() != dim() || x.cols() != dim()) {
    std::ostringstream os;
    os << name() << "::" << what << ": expected " << dim() << "x" << dim() << ", got " << x.rows()
       << "x" << x.cols();
    throw DimensionError(os.str());
  }
}

PlantedTarget plant_low_rank_target(Index n, Index rank, Rng& rng, double eig_lo, double eig_hi) {
  if (rank < 0 || rank > n) throw DimensionError("plant_low_rank_target: need 0 <= rank <= n");
  std::uniform_real_distribution<double> unif(eig_lo, eig_hi);
  Matrix factor = Matrix::Zero(n, std::max<Index>(rank, 1));
  if (rank > 0) {
    const Matrix q = random_orthonormal_columns(n, rank, rng);
    Vector lambda(rank);
    for (Index i = 0; i < rank; ++i) lambda(i) = unif(rng);
    std::sort(lambda.data(), lambda.data() + rank, std::greater<>());
    factor.leftCols(rank) = q * lambda.cwiseSqrt().asDiagonal();
  }
  Matrix x = sym(factor * factor.transpose());
  return PlantedTarget{LiftedMatrix(std::move(x)), FactorMatrix(std::move(factor))};
}

}  // namespace bmland
