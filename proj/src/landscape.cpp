#include "bmland/landscape.hpp"

#include "bmland/rng.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bmland {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::global_optimum: return "global-optimum";
    case Classification::strict_saddle: return "strict-saddle";
    case Classification::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

std::string_view to_string(RankCase c) {
  switch (c) {
    case RankCase::below: return "r'<r*";
    case RankCase::equal: return "r'=r*";
    case RankCase::above: return "r'>r*";
  }
  return "?";
}

KktResidual kkt_residual(const Objective& obj, const LiftedMatrix& x) {
  const Matrix g = sym(obj.gradient(x.mat()));
  KktResidual res;
  res.grad_min_eig = min_eigenvalue(g);
  res.complementarity = (g * x.mat()).norm();
  res.x_min_eig = min_eigenvalue(x.mat());
  return res;
}

FactorMatrix pad_columns(const FactorMatrix& u, Index r) {
  if (u.cols() == r) return u;
  if (u.cols() > r) {
    std::ostringstream os;
    os << "pad_columns: factor has " << u.cols() << " columns, wider than r=" << r;
    throw DimensionError(os.str());
  }
  Matrix padded = Matrix::Zero(u.rows(), r);
  padded.leftCols(u.cols()) = u.mat();
  return FactorMatrix(std::move(padded));
}

FactorMatrix escape_direction(const FactorMatrix& u, const FactorMatrix& ustar) {
  if (u.rows() != ustar.rows()) throw DimensionError("escape_direction: row count mismatch");
  const FactorMatrix padded = pad_columns(ustar, u.cols());
  const ProcrustesResult pr = procrustes_align(u, padded);
  return FactorMatrix(u.mat() - pr.aligned.mat());
}

TheoremBound theorem_bound(const FactorMatrix& u, const FactorMatrix& ustar, double m,
                           double rank_tol) {
  if (!(m > 0.0)) throw ContractError("theorem_bound: need m > 0");
  const FactorMatrix padded = pad_columns(ustar, u.cols());
  const Vector su = singular_values(u.mat());
  const Vector ss = singular_values(padded.mat());
  const double ref = std::max(su.size() ? su(0) : 0.0, ss.size() ? ss(0) : 0.0);

  TheoremBound b;
  b.r_prime = numerical_rank(su, rank_tol, ref);
  b.r_star = numerical_rank(ss, rank_tol, ref);
  const int k = std::max(b.r_prime, b.r_star);
  b.sigma_u = sigma_at(su, k);
  b.sigma_star = sigma_at(ss, k);
  b.d_norm_sq = escape_direction(u, padded).mat().squaredNorm();

  if (b.r_prime < b.r_star) {
    b.rank_case = RankCase::below;
    b.case_factor = std::pow(sigma_at(ss, b.r_star), 2);
  } else if (b.r_prime == b.r_star) {
    b.rank_case = RankCase::equal;
    b.case_factor = std::pow(sigma_at(su, b.r_prime) + sigma_at(ss, b.r_star), 2);
  } else {
    b.rank_case = RankCase::above;
    b.case_factor = std::pow(sigma_at(su, b.r_prime), 2);
  }
  b.value = -kSaddleCurvatureConstant * m * b.sigma_factor() * b.d_norm_sq;
  return b;
}

MinEigEstimate min_eig_estimate(const FactoredProblem& p, const FactorMatrix& u, double tol,
                                int max_iter, std::uint64_t seed, bool cross_check) {
  const Index dim = p.n() * p.r();
  const LinearOperator op = hessian_operator(p, u);
  Rng rng(seed);
  const Vector start = gaussian_matrix(dim, 1, rng);
  const ExtremeEig eig = lanczos_extreme(op, dim, start, max_iter, tol, Extreme::smallest);

  MinEigEstimate est;
  est.value = eig.value;
  est.vector = FactorMatrix(Eigen::Map<const Matrix>(eig.vector.data(), p.n(), p.r()));
  est.residual = eig.residual;
  est.iterations = eig.iterations;
  est.converged = eig.converged;
  if (cross_check && dim <= kDenseCrossCheckLimit) {
    const Matrix dense = materialize(op, dim);
    const double exact = min_eigenvalue(dense);
    est.dense_value = exact;
    const double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
    est.cross_check_ok = std::abs(exact - eig.value) <= std::max(1e-6 * std::abs(exact), 1e-9 * scale);
  }
  return est;
}

PiDiagnostics pi_diagnostics(const Objective& obj, const FactorMatrix& u, const Matrix& xstar,
                             const FactorMatrix& d) {
  const Matrix x = sym(u.mat() * u.mat().transpose());
  const Matrix gap = xstar - x;
  PiDiagnostics pi;
  pi.pi1 = boost::math::quadrature::gauss<double, 16>::integrate(
      [&](double t) { return obj.hess_bilinear(t * x + (1.0 - t) * xstar, gap, gap); }, 0.0, 1.0);
  pi.pi2 = inner(obj.gradient(xstar), gap);
  const Matrix du = d.mat() * u.mat().transpose();
  pi.pi3 = obj.hess_bilinear(x, du, du);
  pi.lifted_gap_sq = gap.squaredNorm();
  pi.du_norm_sq = du.squaredNorm();
  return pi;
}

double default_critical_tol(const FactorMatrix& u, double big_m) {
  return 1e-9 * (1.0 + big_m * std::pow(u.norm(), 3));
}

CriticalPointReport classify_critical_point(const FactoredProblem& p, const FactorMatrix& u,
                                            const std::optional<FactorMatrix>& ustar,
                                            const std::optional<double>& m,
                                            const ClassifyOptions& opts) {
  p.check_factor(u, "classify_critical_point");
  const Objective& obj = p.objective();
  const auto spectrum = obj.known_spectrum();

  CriticalPointReport rep;
  rep.grad_norm = g_gradient(p, u).norm();
  if (!std::isfinite(rep.grad_norm)) throw InstanceError("classify_critical_point: non-finite gradient");
  const double tol_crit =
      opts.tol_crit > 0.0 ? opts.tol_crit : default_critical_tol(u, spectrum ? spectrum->big_m : 1.0);
  if (rep.grad_norm > tol_crit) {
    std::ostringstream os;
    os << "classify_critical_point: not a critical point (||grad g|| = " << rep.grad_norm
       << " > " << tol_crit << ")";
    throw ContractError(os.str());
  }
  if (spectrum) rep.regime_supported = spectrum->condition() <= kSupportedConditionNumber + 1e-12;

  const LiftedMatrix x = lift(u);
  const double scale = 1.0 + x.mat().norm();
  rep.kkt = kkt_residual(obj, x);

  bool negative_eig = false;
  if (opts.compute_lambda_min) {
    const MinEigEstimate me = min_eig_estimate(p, u);
    rep.lambda_min_estimate = me.value;
    rep.lambda_min_converged = me.converged && me.cross_check_ok;
    negative_eig = rep.lambda_min_converged && me.value < -opts.tol * scale;
  }

  if (!ustar) {
    if (rep.kkt.passes(opts.tol * scale)) {
      rep.classification = Classification::global_optimum;
    } else if (negative_eig) {
      rep.classification = Classification::strict_saddle;
    } else {
      rep.classification = Classification::indeterminate;
    }
    return rep;
  }

  const FactorMatrix padded = pad_columns(*ustar, p.r());
  const Matrix xstar = sym(padded.mat() * padded.mat().transpose());
  const double err = (x.mat() - xstar).norm();
  rep.lifted_error = err;

  const FactorMatrix d = escape_direction(u, padded);
  rep.curvature_along_d = g_hess_bilinear(p, u, d, d);
  rep.escape_direction = d;

  if (m) {
    const TheoremBound b = theorem_bound(u, padded, *m, opts.rank_tol);
    rep.r_prime = b.r_prime;
    rep.r_star = b.r_star;
    rep.bound = b;
    rep.bound_holds =
        b.value < 0.0 && rep.curvature_along_d < b.value + opts.bound_slack_rel * std::abs(b.value);
  } else {
    const Vector su = singular_values(u.mat());
    const Vector ss = singular_values(padded.mat());
    const double ref = std::max(su(0), ss(0));
    rep.r_prime = numerical_rank(su, opts.rank_tol, ref);
    rep.r_star = numerical_rank(ss, opts.rank_tol, ref);
  }

  if (err <= opts.tol * (1.0 + xstar.norm())) {
    rep.classification = Classification::global_optimum;
    return rep;
  }
  rep.pi = pi_diagnostics(obj, u, xstar, d);
  rep.classification = (rep.bound_holds || negative_eig) ? Classification::strict_saddle
                                                         : Classification::indeterminate;
  return rep;
}

InequalityReport check_lemma3(const FactoredProblem& p, const FactorMatrix& u, const Matrix& xstar,
                              double m, double big_m, double tol_crit, double slack_abs,
                              double rank_tol) {
  p.check_factor(u, "check_lemma3");
  require_same_shape(xstar, Matrix(p.n(), p.n()), "check_lemma3");
  if (!(m > 0.0) || !(big_m >= m)) throw ContractError("check_lemma3: need 0 < m <= M");
  const double gn = g_gradient(p, u).norm();
  const double crit = tol_crit > 0.0 ? tol_crit : default_critical_tol(u, big_m);
  if (gn > crit) {
    std::ostringstream os;
    os << "check_lemma3: not a critical point (||grad g|| = " << gn << " > " << crit << ")";
    throw ContractError(os.str());
  }
  const Matrix gap = sym(u.mat() * u.mat().transpose()) - xstar;
  const Matrix q = range_basis(u, rank_tol, std::sqrt(xstar.norm()));
  InequalityReport rep;
  rep.lhs = (gap * q * q.transpose()).norm();
  rep.rhs = (big_m - m) / (big_m + m) * gap.norm();
  rep.slack = slack_abs;
  rep.holds = rep.lhs <= rep.rhs + rep.slack;
  return rep;
}

PcaSpectrum pca_spectrum(const LiftedMatrix& xstar, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(xstar.mat());
  const Vector& evals = es.eigenvalues();
  const Index n = evals.size();
  const double top = std::max(evals(n - 1), 0.0);
  std::vector<Index> keep;
  for (Index i = n - 1; i >= 0; --i) {
    if (evals(i) > rank_tol * top && evals(i) > 0.0) keep.push_back(i);
  }
  PcaSpectrum s;
  s.eigenvectors.resize(n, static_cast<Index>(keep.size()));
  s.eigenvalues.resize(static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    s.eigenvectors.col(static_cast<Index>(j)) = es.eigenvectors().col(keep[j]);
    s.eigenvalues(static_cast<Index>(j)) = evals(keep[j]);
  }
  return s;
}

FactorMatrix pca_optimal_factor(const LiftedMatrix& xstar, Index r, double rank_tol) {
  const PcaSpectrum s = pca_spectrum(xstar, rank_tol);
  const Index rs = s.eigenvalues.size();
  if (r < rs) {
    std::ostringstream os;
    os << "pca_optimal_factor: r=" << r << " below rank(X*)=" << rs;
    throw ContractError(os.str());
  }
  Matrix u = Matrix::Zero(xstar.dim(), r);
  u.leftCols(rs) = s.eigenvectors * s.eigenvalues.cwiseSqrt().asDiagonal();
  return FactorMatrix(std::move(u));
}

FactorMatrix construct_pca_saddle(const LiftedMatrix& xstar, Index r,
                                  const std::vector<int>& selector, std::uint64_t seed,
                                  double rank_tol) {
  const PcaSpectrum s = pca_spectrum(xstar, rank_tol);
  const Index rs = s.eigenvalues.size();
  if (static_cast<Index>(selector.size()) != rs) {
    std::ostringstream os;
    os << "construct_pca_saddle: selector length " << selector.size() << " != rank(X*) = " << rs;
    throw DimensionError(os.str());
  }
  Index active = 0;
  for (int sj : selector) {
    if (sj != 0 && sj != 1) throw ContractError("construct_pca_saddle: selector entries must be 0 or 1");
    active += sj;
  }
  if (active > r) throw ContractError("construct_pca_saddle: more selected pairs than columns");
  if (r < 1 || r > xstar.dim()) throw DimensionError("construct_pca_saddle: need 1 <= r <= n");

  Matrix base = Matrix::Zero(xstar.dim(), r);
  Index slot = 0;
  for (Index j = 0; j < rs; ++j) {
    // Column j when it fits (r >= r*), otherwise pack the selected pairs.
    const Index col = r >= rs ? j : slot;
    if (selector[static_cast<std::size_t>(j)] == 1) {
      base.col(col) = std::sqrt(s.eigenvalues(j)) * s.eigenvectors.col(j);
      ++slot;
    }
  }
  Rng rng(seed);
  const Matrix v = random_orthogonal(r, rng);
  return FactorMatrix(base * v.transpose());
}

namespace {

CriticalSearchResult gauss_newton_search(const FactoredProblem& p, const FactorMatrix& u0,
                                         const CriticalSearchConfig& cfg) {
  const Index dim = p.n() * p.r();
  Matrix u = u0.mat();
  Matrix grad = g_gradient(p, FactorMatrix(u)).mat();
  double h = 0.5 * grad.squaredNorm();
  double mu = 1e-3;

  CriticalSearchResult res{FactorMatrix(u), false, 0, std::sqrt(2.0 * h)};
  for (int it = 0; it < cfg.max_iters; ++it) {
    res.iterations = it;
    if (std::sqrt(2.0 * h) <= cfg.tol_crit) break;
    const Matrix hess = materialize(hessian_operator(p, FactorMatrix(u)), dim);
    const Vector g = Eigen::Map<const Vector>(grad.data(), dim);
    const Matrix normal = hess * hess;
    const Vector rhs = -(hess * g);
    const double scale = std::max(1.0, normal.diagonal().maxCoeff());

    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      Matrix damped = normal;
      damped.diagonal().array() += mu * scale;
      const Vector step = damped.ldlt().solve(rhs);
      const Matrix trial = u + Eigen::Map<const Matrix>(step.data(), p.n(), p.r());
      if (trial.allFinite()) {
        Matrix trial_grad = g_gradient(p, FactorMatrix(trial)).mat();
        const double trial_h = 0.5 * trial_grad.squaredNorm();
        if (std::isfinite(trial_h) && trial_h < h) {
          u = trial;
          grad = std::move(trial_grad);
          h = trial_h;
          mu = std::max(mu / 3.0, 1e-15);
          accepted = true;
          break;
        }
      }
      mu *= 4.0;
    }
    if (!accepted) break;
  }
  res.u = FactorMatrix(u);
  res.grad_norm = std::sqrt(2.0 * h);
  res.converged = res.grad_norm <= cfg.tol_crit;
  return res;
}

}  // namespace

CriticalSearchResult find_critical_point(const FactoredProblem& p, const FactorMatrix& u0,
                                         const CriticalSearchConfig& cfg) {
  p.check_factor(u0, "find_critical_point");
  if (cfg.method == CriticalSearchMethod::gauss_newton && p.n() * p.r() <= kDenseCrossCheckLimit) {
    return gauss_newton_search(p, u0, cfg);
  }
  Matrix u = u0.mat();
  FactorMatrix grad = g_gradient(p, FactorMatrix(u));
  double h = 0.5 * grad.mat().squaredNorm();
  double step = cfg.initial_step;

  CriticalSearchResult res{FactorMatrix(u), false, 0, std::sqrt(2.0 * h)};
  for (int it = 0; it < cfg.max_iters; ++it) {
    res.iterations = it;
    if (std::sqrt(2.0 * h) <= cfg.tol_crit) {
      res.converged = true;
      break;
    }
    const Matrix dir = g_hess_apply(p, FactorMatrix(u), grad).mat();
    const double slope = dir.squaredNorm();
    if (slope == 0.0 || !std::isfinite(slope)) break;  // stationary point of h that is not critical

    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      const Matrix trial = u - step * dir;
      if (trial.allFinite()) {
        FactorMatrix trial_grad = g_gradient(p, FactorMatrix(trial));
        const double trial_h = 0.5 * trial_grad.mat().squaredNorm();
        if (std::isfinite(trial_h) && trial_h <= h - cfg.armijo * step * slope) {
          u = trial;
          grad = std::move(trial_grad);
          h = trial_h;
          accepted = true;
          break;
        }
      }
      step *= cfg.shrink;
    }
    if (!accepted) break;
    step = std::min(step * 2.0, 1e12);
  }
  res.u = FactorMatrix(u);
  res.grad_norm = std::sqrt(2.0 * h);
  res.converged = res.grad_norm <= cfg.tol_crit;
  return res;
}

}  // namespace bmland
