#include "bmland/objectives.hpp"
#include "bmland/geometry.hpp"
#include "bmland/spectral.hpp"

#include <cmath>
#include <limits>

namespace bmland {

RscRssEstimate estimate_rsc_rss(const Objective& obj, Index r, int n_points, int n_dirs,
                                Rng& rng) {
  if (n_points < 1 || n_dirs < 1) throw ContractError("estimate_rsc_rss: need n_points, n_dirs >= 1");
  const Index n = obj.dim();
  const Index k = std::min<Index>(2 * r, n);
  const Index dim = n * (n + 1) / 2;
  std::uniform_real_distribution<double> log_scale(-1.0, 1.0);

  RscRssEstimate est;
  est.m_hat = std::numeric_limits<double>::infinity();
  est.big_m_hat = -std::numeric_limits<double>::infinity();
  est.rank_budget = static_cast<int>(2 * r);

  for (int p = 0; p < n_points; ++p) {
    Matrix v = gaussian_matrix(n, k, rng);
    const double target_norm = std::pow(10.0, log_scale(rng));
    const double vn = v.norm();
    if (vn > 0.0) v *= std::sqrt(target_norm) / vn;
    const Matrix x = sym(v * v.transpose());

    const LinearOperator op = [&](const Vector& g) {
      return vec_sym(obj.hess_apply(x, unvec_sym(g, n)));
    };
    for (int d = 0; d < n_dirs; ++d) {
      const Vector start = gaussian_matrix(dim, 1, rng);
      const auto lo = lanczos_extreme(op, dim, start, static_cast<int>(dim), 1e-12, Extreme::smallest);
      const auto hi = lanczos_extreme(op, dim, start, static_cast<int>(dim), 1e-12, Extreme::largest);
      if (!std::isfinite(lo.value) || !std::isfinite(hi.value)) {
        throw InstanceError("estimate_rsc_rss: non-finite Hessian spectrum for " + obj.name());
      }
      est.m_hat = std::min(est.m_hat, lo.value);
      est.big_m_hat = std::max(est.big_m_hat, hi.value);
      ++est.samples;
    }
  }
  return est;
}

double check_rip_hat(const Objective& obj, const Matrix& x, const Matrix& g, const Matrix& h,
                     double m, double big_m, Index max_rank) {
  if (!(m > 0.0) || !(big_m > 0.0)) throw ContractError("check_rip_hat: need m, M > 0");
  if (max_rank >= 0) {
    const LiftedMatrix lx(x);
    if (!lx.is_psd()) throw ContractError("check_rip_hat: X must be PSD");
    if (numerical_rank(x) > max_rank) throw ContractError("check_rip_hat: rank(X) exceeds budget");
  }
  const double scaled = 2.0 / (big_m + m) * obj.hess_bilinear(x, g, h);
  const double delta = (big_m - m) / (big_m + m);
  return std::abs(scaled - inner(g, h)) - delta * g.norm() * h.norm();
}

}  // namespace bmland
