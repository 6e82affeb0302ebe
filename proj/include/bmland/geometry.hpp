#pragma once

// Factored-space and lifted-space geometry: the lifting map U -> UU^T,
// orthogonal Procrustes alignment, the distance between equivalence classes
// {UR : R orthogonal}, and checkers for the distance inequalities that tie the
// two spaces together.

#include "bmland/types.hpp"

#include <cmath>

namespace bmland {

inline constexpr double kDefaultRankTol = 1e-9;
inline constexpr double kDefaultSlack = 1e-10;
inline constexpr double kPsdTol = 1e-8;
inline constexpr double kSymmetryTol = 1e-10;

/// 1 / (2(sqrt2 - 1)), about 1.2071.
inline const double kAlignedProductCoef = 1.0 / (2.0 * (std::sqrt(2.0) - 1.0));
/// Coefficient of the range-projected term: 3 + 1 / (2(sqrt2 - 1)).
inline const double kProjectedTermCoef = 3.0 + kAlignedProductCoef;
inline constexpr double kFullTermCoef = 1.0 / 8.0;

/// Outcome of checking `lhs <= rhs`. `holds` allows
/// slack = slack_rel * max(1, |lhs|, |rhs|).
struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = true;

  double margin() const { return rhs - lhs; }
};

InequalityReport make_report(double lhs, double rhs, double slack_rel = kDefaultSlack);

LiftedMatrix lift(const FactorMatrix& u);

struct ProcrustesResult {
  Matrix rotation;       // r x r orthogonal R
  double distance = 0;   // ||U1 - U2 R||_F
  FactorMatrix aligned;  // U2 R
};

/// R = argmin_{R orthogonal} ||U1 - U2 R||_F, from the SVD U2^T U1 = L S P^T as
/// R = L P^T. Afterwards U1^T U2 R is symmetric PSD and <U1, U2 R> equals the
/// nuclear norm of U1^T U2. With repeated singular values any maximizer is
/// returned.
ProcrustesResult procrustes_align(const FactorMatrix& u1, const FactorMatrix& u2);

/// min_R ||U1 - U2 R||_F over orthogonal R.
double factor_distance(const FactorMatrix& u1, const FactorMatrix& u2);

/// Singular values, descending.
Vector singular_values(const Matrix& a);

/// #{sigma_i > rank_tol * max(sigma_1, reference_scale)}. A positive
/// reference_scale keeps numerically-zero factors at rank 0.
int numerical_rank(const Vector& sv, double rank_tol = kDefaultRankTol,
                   double reference_scale = 0.0);
int numerical_rank(const Matrix& a, double rank_tol = kDefaultRankTol,
                   double reference_scale = 0.0);

/// The k-th largest singular value (1-based); 0 for k == 0 or k beyond the list.
double sigma_at(const Vector& sv, int k);

/// (sigma_k(U1) + sigma_k(U2)) * d(U1, U2) with k = max(rank U1, rank U2).
double lifted_distance_bound(const FactorMatrix& u1, const FactorMatrix& u2,
                             double rank_tol = kDefaultRankTol);

/// lhs = lifted_distance_bound, rhs = ||U1U1^T - U2U2^T||_F.
InequalityReport check_lifted_distance(const FactorMatrix& u1, const FactorMatrix& u2,
                                       double rank_tol = kDefaultRankTol,
                                       double slack_rel = kDefaultSlack);

/// Orthonormal basis Q (n x r') of Range(U), r' the numerical rank. U = 0
/// yields an n x 0 matrix, i.e. QQ^T is the zero projector.
Matrix range_basis(const FactorMatrix& u, double rank_tol = kDefaultRankTol,
                   double reference_scale = 0.0);

/// Throws ContractError unless U^T Uhat is symmetric PSD within tolerance.
void require_aligned_psd(const FactorMatrix& u, const FactorMatrix& uhat);

/// ||(U - Uhat)U^T||^2 <= 1/8 ||UU^T - UhatUhat^T||^2
///                       + (3 + 1/(2(sqrt2-1))) ||(UU^T - UhatUhat^T)QQ^T||^2,
/// Q = range_basis(U). Requires U^T Uhat symmetric PSD.
InequalityReport check_factor_product_bound(const FactorMatrix& u, const FactorMatrix& uhat,
                                            double rank_tol = kDefaultRankTol,
                                            double slack_rel = kDefaultSlack);

/// ||(U - Uhat)U^T||^2 <= 1/(2(sqrt2-1)) ||UU^T - UhatUhat^T||^2.
/// Requires U^T Uhat symmetric PSD.
InequalityReport check_aligned_product_bound(const FactorMatrix& u, const FactorMatrix& uhat,
                                             double slack_rel = kDefaultSlack);

inline constexpr double kSqrtEigFloor = 1e-12;

/// Square root of a symmetric PSD matrix via eigendecomposition. Eigenvalues
/// at or below kSqrtEigFloor * lambda_max are rounding noise and map to zero.
Matrix psd_sqrt(const Matrix& x);

double nuclear_norm(const Matrix& a);

/// <sqrt(U1U1^T), sqrt(U2U2^T)> <= max_R <U1, U2 R> = ||U1^T U2||_*.
InequalityReport check_sqrt_inner_bound(const FactorMatrix& u1, const FactorMatrix& u2,
                                        double slack_rel = kDefaultSlack);

}  // namespace bmland
