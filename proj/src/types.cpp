#include "bmland/types.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>

namespace bmland {

bool all_finite(const Matrix& a) { return a.allFinite(); }

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << what << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
       << b.cols();
    throw DimensionError(os.str());
  }
}

FactorMatrix::FactorMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw DimensionError("FactorMatrix: need n >= 1 and r >= 1");
  }
  if (!data_.allFinite()) {
    throw InstanceError("FactorMatrix: non-finite entry");
  }
}

FactorMatrix FactorMatrix::zeros(Index n, Index r) { return FactorMatrix(Matrix::Zero(n, r)); }

LiftedMatrix::LiftedMatrix(Matrix data, double symmetry_tol)
    : data_(std::move(data)), symmetry_tol_(symmetry_tol) {
  if (data_.rows() != data_.cols() || data_.rows() < 1) {
    throw DimensionError("LiftedMatrix: must be square and non-empty");
  }
  if (!data_.allFinite()) {
    throw InstanceError("LiftedMatrix: non-finite entry");
  }
  const double asym = (data_ - data_.transpose()).cwiseAbs().maxCoeff();
  if (asym > symmetry_tol_ * (1.0 + data_.norm())) {
    std::ostringstream os;
    os << "LiftedMatrix: not symmetric (max |X - X^T| = " << asym << ")";
    throw ContractError(os.str());
  }
}

bool LiftedMatrix::is_psd(double psd_tol) const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(data_), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) >= -psd_tol * (1.0 + data_.norm());
}

}  // namespace bmland
