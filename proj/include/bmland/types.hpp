#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bmland {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Shapes disagree between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation does not hold.
class ContractError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An objective instance produced a non-finite value or is otherwise unusable.
class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point U in the factored space: an n x r real matrix with finite entries.
class FactorMatrix {
 public:
  explicit FactorMatrix(Matrix data);

  static FactorMatrix zeros(Index n, Index r);

  const Matrix& mat() const noexcept { return data_; }
  Index rows() const noexcept { return data_.rows(); }
  Index cols() const noexcept { return data_.cols(); }
  double norm() const { return data_.norm(); }

 private:
  Matrix data_;
};

/// A symmetric n x n matrix X in the lifted space.
class LiftedMatrix {
 public:
  static constexpr double kDefaultSymmetryTol = 1e-10;

  /// Throws ContractError if max|X - X^T| exceeds symmetry_tol * (1 + ||X||_F).
  explicit LiftedMatrix(Matrix data, double symmetry_tol = kDefaultSymmetryTol);

  const Matrix& mat() const noexcept { return data_; }
  Index dim() const noexcept { return data_.rows(); }
  double symmetry_tol() const noexcept { return symmetry_tol_; }

  /// Minimum eigenvalue >= -psd_tol * (1 + ||X||_F).
  bool is_psd(double psd_tol = 1e-8) const;

 private:
  Matrix data_;
  double symmetry_tol_;
};

inline Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// Frobenius inner product.
inline double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

bool all_finite(const Matrix& a);

}  // namespace bmland
