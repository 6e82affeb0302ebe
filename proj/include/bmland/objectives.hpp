#pragma once

// Convex objectives f(X) over symmetric matrices. Every instance evaluates on
// the symmetric part of its argument, so gradients are symmetric and
// hess_bilinear(X; G, H) only sees sym(G) and sym(H). The factored-model
// Hessian formula relies on that.

#include "bmland/rng.hpp"
#include "bmland/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace bmland {

/// Restricted strong convexity / smoothness constants m <= M.
struct SpectrumBounds {
  double m = 0.0;
  double big_m = 0.0;

  double condition() const { return big_m / m; }
  /// (M - m) / (M + m)
  double delta() const { return (big_m - m) / (big_m + m); }
};

class Objective {
 public:
  virtual ~Objective() = default;

  virtual Index dim() const = 0;
  virtual std::string name() const = 0;

  virtual double value(const Matrix& x) const = 0;
  virtual Matrix gradient(const Matrix& x) const = 0;
  /// The matrix W with <W, H> = hess_bilinear(X; G, H) for every H. Symmetric.
  virtual Matrix hess_apply(const Matrix& x, const Matrix& g) const = 0;
  virtual double hess_bilinear(const Matrix& x, const Matrix& g, const Matrix& h) const;

  virtual bool closed_form_hessian() const { return true; }
  /// Exact (m, M) when the construction fixes them.
  virtual std::optional<SpectrumBounds> known_spectrum() const { return std::nullopt; }
  /// The PSD minimizer X* when the construction plants one.
  virtual std::optional<Matrix> known_minimizer() const { return std::nullopt; }

 protected:
  void check_square(const Matrix& x, const char* what) const;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

/// f(X) = 1/2 ||X - X*||_F^2; identity Hessian.
class PcaObjective final : public Objective {
 public:
  explicit PcaObjective(LiftedMatrix target);

  Index dim() const override { return target_.dim(); }
  std::string name() const override { return "pca"; }
  double value(const Matrix& x) const override;
  Matrix gradient(const Matrix& x) const override;
  Matrix hess_apply(const Matrix& x, const Matrix& g) const override;
  double hess_bilinear(const Matrix& x, const Matrix& g, const Matrix& h) const override;
  std::optional<SpectrumBounds> known_spectrum() const override { return SpectrumBounds{1.0, 1.0}; }
  std::optional<Matrix> known_minimizer() const override { return target_.mat(); }

  const LiftedMatrix& target() const { return target_; }

 private:
  LiftedMatrix target_;
};

/// Isometric vectorization of the symmetric part: diagonal entries as-is,
/// strict upper triangle scaled by sqrt(2). Length n(n+1)/2.
Vector vec_sym(const Matrix& x);
/// Adjoint (and inverse on symmetric matrices) of vec_sym.
Matrix unvec_sym(const Vector& v, Index n);

/// f(X) = 1/2 <v, H v> with v = vec_sym(X - X*) and H a dense self-adjoint
/// positive operator whose spectrum is exactly [m, M].
class ConditionedQuadratic final : public Objective {
 public:
  /// H = B diag(lambda) B^T with B a seeded Haar basis of the symmetric-matrix
  /// space and lambda uniform in [m, M] with the extremes pinned to m and M.
  static std::shared_ptr<const ConditionedQuadratic> create(LiftedMatrix target, double m,
                                                            double big_m, std::uint64_t seed);

  Index dim() const override { return target_.dim(); }
  std::string name() const override { return "conditioned-quadratic"; }
  double value(const Matrix& x) const override;
  Matrix gradient(const Matrix& x) const override;
  Matrix hess_apply(const Matrix& x, const Matrix& g) const override;
  double hess_bilinear(const Matrix& x, const Matrix& g, const Matrix& h) const override;
  std::optional<SpectrumBounds> known_spectrum() const override { return bounds_; }
  std::optional<Matrix> known_minimizer() const override { return target_.mat(); }

  const Matrix& operator_matrix() const { return op_; }
  const LiftedMatrix& target() const { return target_; }

 private:
  ConditionedQuadratic(LiftedMatrix target, Matrix op, SpectrumBounds bounds);
  Vector apply_op(const Vector& v) const;

  LiftedMatrix target_;
  Matrix op_;
  SpectrumBounds bounds_;
};

/// f(X) = 1/2 sum_i (<A_i, X> - b_i)^2 with A_i = sym(G_i)/sqrt(p), G_i standard
/// Gaussian, and b_i = <A_i, X*>.
class GaussianSensing final : public Objective {
 public:
  static std::shared_ptr<const GaussianSensing> create(LiftedMatrix target, Index measurements,
                                                       std::uint64_t seed);

  Index dim() const override { return target_.dim(); }
  std::string name() const override { return "gaussian-sensing"; }
  double value(const Matrix& x) const override;
  Matrix gradient(const Matrix& x) const override;
  Matrix hess_apply(const Matrix& x, const Matrix& g) const override;
  double hess_bilinear(const Matrix& x, const Matrix& g, const Matrix& h) const override;
  std::optional<Matrix> known_minimizer() const override { return target_.mat(); }

  Index measurements() const { return p_; }
  /// The i-th sensing matrix.
  Matrix sensing_matrix(Index i) const;
  const Vector& observations() const { return obs_; }

 private:
  GaussianSensing(LiftedMatrix target, Index p, std::vector<double> a, Vector obs);
  Vector measure(const Matrix& x) const;
  Matrix adjoint(const Vector& w) const;

  LiftedMatrix target_;
  Index p_;
  std::vector<double> a_;  // p x n^2 row-major; row i is A_i column-major
  Vector obs_;
};

/// f(X) = sum_{i<=j} log(1 + exp(-Y_ij X_ij)) + ridge/2 ||X||_F^2 for a
/// symmetric sign pattern Y.
class LogisticPca final : public Objective {
 public:
  static std::shared_ptr<const LogisticPca> create(Matrix signs, double ridge);

  Index dim() const override { return signs_.rows(); }
  std::string name() const override { return "logistic"; }
  double value(const Matrix& x) const override;
  Matrix gradient(const Matrix& x) const override;
  Matrix hess_apply(const Matrix& x, const Matrix& g) const override;

  double ridge() const { return ridge_; }

 private:
  LogisticPca(Matrix signs, double ridge);

  Matrix signs_;
  double ridge_;
};

/// A planted rank-k PSD target X* = Q diag(lambda) Q^T with eigenvalues drawn
/// uniformly in [eig_lo, eig_hi], and its factor Q diag(sqrt(lambda)).
struct PlantedTarget {
  LiftedMatrix x;
  FactorMatrix factor;
};

PlantedTarget plant_low_rank_target(Index n, Index rank, Rng& rng, double eig_lo = 1.0,
                                    double eig_hi = 3.0);

struct RscRssEstimate {
  double m_hat = 0.0;
  double big_m_hat = 0.0;
  int samples = 0;
  int rank_budget = 0;

  double ratio() const { return big_m_hat / m_hat; }
};

/// Samples PSD points X = VV^T, V Gaussian n x 2r rescaled to norms spread
/// over two decades, and estimates the extreme eigenvalues of the Hessian on
/// the symmetric-matrix space by Lanczos from n_dirs random starts. Returns
/// the smallest and largest values seen.
RscRssEstimate estimate_rsc_rss(const Objective& obj, Index r, int n_points, int n_dirs, Rng& rng);

/// |(2/(M+m)) hess(X; G, H) - <G, H>| - ((M-m)/(M+m)) ||G|| ||H||; nonpositive
/// when the restricted orthogonality bound holds. When max_rank >= 0, X must be
/// PSD with numerical rank <= max_rank.
double check_rip_hat(const Objective& obj, const Matrix& x, const Matrix& g, const Matrix& h,
                     double m, double big_m, Index max_rank = -1);

}  // namespace bmland
