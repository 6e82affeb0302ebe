#include "bmland/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <sstream>

namespace bmland {

InequalityReport make_report(double lhs, double rhs, double slack_rel) {
  InequalityReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.slack = slack_rel * std::max({1.0, std::abs(lhs), std::abs(rhs)});
  rep.holds = lhs <= rhs + rep.slack;
  return rep;
}

LiftedMatrix lift(const FactorMatrix& u) {
  Matrix x = u.mat() * u.mat().transpose();
  return LiftedMatrix(sym(x));
}

ProcrustesResult procrustes_align(const FactorMatrix& u1, const FactorMatrix& u2) {
  require_same_shape(u1.mat(), u2.mat(), "procrustes_align");
  const Matrix cross = u2.mat().transpose() * u1.mat();
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix rot = svd.matrixU() * svd.matrixV().transpose();
  Matrix aligned = u2.mat() * rot;
  const double dist = (u1.mat() - aligned).norm();
  return ProcrustesResult{std::move(rot), dist, FactorMatrix(std::move(aligned))};
}

double factor_distance(const FactorMatrix& u1, const FactorMatrix& u2) {
  return procrustes_align(u1, u2).distance;
}

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

int numerical_rank(const Vector& sv, double rank_tol, double reference_scale) {
  if (sv.size() == 0) return 0;
  const double thresh = rank_tol * std::max(sv(0), reference_scale);
  int rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > thresh) ++rank;
  }
  return rank;
}

int numerical_rank(const Matrix& a, double rank_tol, double reference_scale) {
  return numerical_rank(singular_values(a), rank_tol, reference_scale);
}

double sigma_at(const Vector& sv, int k) {
  if (k <= 0 || k > sv.size()) return 0.0;
  return sv(k - 1);
}

double lifted_distance_bound(const FactorMatrix& u1, const FactorMatrix& u2, double rank_tol) {
  require_same_shape(u1.mat(), u2.mat(), "lifted_distance_bound");
  const Vector s1 = singular_values(u1.mat());
  const Vector s2 = singular_values(u2.mat());
  const int k = std::max(numerical_rank(s1, rank_tol), numerical_rank(s2, rank_tol));
  if (k == 0) return 0.0;
  return (sigma_at(s1, k) + sigma_at(s2, k)) * factor_distance(u1, u2);
}

InequalityReport check_lifted_distance(const FactorMatrix& u1, const FactorMatrix& u2,
                                       double rank_tol, double slack_rel) {
  const double bound = lifted_distance_bound(u1, u2, rank_tol);
  const double lifted = (lift(u1).mat() - lift(u2).mat()).norm();
  return make_report(bound, lifted, slack_rel);
}

Matrix range_basis(const FactorMatrix& u, double rank_tol, double reference_scale) {
  Eigen::JacobiSVD<Matrix> svd(u.mat(), Eigen::ComputeThinU);
  const int rank = numerical_rank(Vector(svd.singularValues()), rank_tol, reference_scale);
  return svd.matrixU().leftCols(rank);
}

void require_aligned_psd(const FactorMatrix& u, const FactorMatrix& uhat) {
  require_same_shape(u.mat(), uhat.mat(), "aligned pair");
  const Matrix c = u.mat().transpose() * uhat.mat();
  const double scale = 1.0 + c.norm();
  const double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    std::ostringstream os;
    os << "U^T Uhat must be symmetric PSD: asymmetry " << asym;
    throw ContractError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(c), Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -kPsdTol * scale) {
    std::ostringstream os;
    os << "U^T Uhat must be symmetric PSD: min eigenvalue " << es.eigenvalues()(0);
    throw ContractError(os.str());
  }
}

InequalityReport check_factor_product_bound(const FactorMatrix& u, const FactorMatrix& uhat,
                                            double rank_tol, double slack_rel) {
  require_aligned_psd(u, uhat);
  const Matrix& a = u.mat();
  const Matrix& b = uhat.mat();
  const Matrix diff = a * a.transpose() - b * b.transpose();
  const Matrix q = range_basis(u, rank_tol);
  const double lhs = ((a - b) * a.transpose()).squaredNorm();
  const double projected = (diff * q * q.transpose()).squaredNorm();
  const double rhs = kFullTermCoef * diff.squaredNorm() + kProjectedTermCoef * projected;
  return make_report(lhs, rhs, slack_rel);
}

InequalityReport check_aligned_product_bound(const FactorMatrix& u, const FactorMatrix& uhat,
                                             double slack_rel) {
  require_aligned_psd(u, uhat);
  const Matrix& a = u.mat();
  const Matrix& b = uhat.mat();
  const double lhs = ((a - b) * a.transpose()).squaredNorm();
  const double rhs = kAlignedProductCoef * (a * a.transpose() - b * b.transpose()).squaredNorm();
  return make_report(lhs, rhs, slack_rel);
}

Matrix psd_sqrt(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(x));
  const Vector& ev = es.eigenvalues();
  const double floor = kSqrtEigFloor * ev.cwiseAbs().maxCoeff();
  const Vector roots = ev.unaryExpr([floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

double nuclear_norm(const Matrix& a) { return singular_values(a).sum(); }

InequalityReport check_sqrt_inner_bound(const FactorMatrix& u1, const FactorMatrix& u2,
                                        double slack_rel) {
  require_same_shape(u1.mat(), u2.mat(), "check_sqrt_inner_bound");
  const double lhs = inner(psd_sqrt(lift(u1).mat()), psd_sqrt(lift(u2).mat()));
  const double rhs = nuclear_norm(u1.mat().transpose() * u2.mat());
  return make_report(lhs, rhs, slack_rel);
}

}  // namespace bmland
