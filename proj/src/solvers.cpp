#include "bmland/solvers.hpp"

#include "bmland/geometry.hpp"
#include "bmland/landscape.hpp"
#include "bmland/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bmland {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxStep = 1e12;
// Relative decrease of g over a patience window below which the run counts as stuck.
constexpr double kProgressFraction = 1e-4;

void require(bool ok, const char* what) {
  if (!ok) throw ContractError(std::string("SolverConfig: ") + what);
}

double lifted_distance(const Matrix& u, const std::optional<Matrix>& xstar) {
  if (!xstar) return kNaN;
  return (u * u.transpose() - *xstar).norm();
}

struct Iterate {
  Matrix u;
  double g = 0.0;
  Matrix grad;
};

Iterate evaluate(const FactoredProblem& p, Matrix u, const SolverTrace& trace) {
  Iterate it;
  it.u = std::move(u);
  try {
    const FactorMatrix f(it.u);
    it.g = g_value(p, f);
    it.grad = g_gradient(p, f).mat();
  } catch (const DivergenceError&) {
    throw;
  } catch (const InstanceError& e) {
    throw DivergenceError(std::string("gradient_descent: ") + e.what(), trace);
  }
  return it;
}

// g(U) or +inf when the objective reports a non-finite value.
double trial_value(const FactoredProblem& p, const Matrix& u) {
  try {
    return g_value(p, FactorMatrix(u));
  } catch (const DivergenceError&) {
    throw;
  } catch (const InstanceError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// One gradient step from `cur`. Returns false when backtracking gives up.
bool descend(const FactoredProblem& p, Iterate& cur, double& step, const SolverConfig& cfg,
             SolverTrace& trace) {
  const double gn2 = cur.grad.squaredNorm();
  if (cfg.fixed_step) {
    Matrix next = cur.u - cfg.step_size * cur.grad;
    if (!next.allFinite()) throw DivergenceError("gradient_descent: non-finite iterate", trace);
    Iterate nxt = evaluate(p, std::move(next), trace);
    if (!std::isfinite(nxt.g) || !nxt.grad.allFinite()) {
      throw DivergenceError("gradient_descent: non-finite objective value", trace);
    }
    step = cfg.step_size;
    cur = std::move(nxt);
    return true;
  }
  double eta = step;
  for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
    Matrix next = cur.u - eta * cur.grad;
    if (next.allFinite()) {
      const double gv = trial_value(p, next);
      if (std::isfinite(gv) && gv <= cur.g - cfg.armijo * eta * gn2) {
        Iterate nxt = evaluate(p, std::move(next), trace);
        if (!nxt.grad.allFinite()) {
          throw DivergenceError("gradient_descent: non-finite gradient", trace);
        }
        step = eta;
        cur = std::move(nxt);
        return true;
      }
    }
    eta *= cfg.shrink;
  }
  return false;
}

double lambda_min_at(const FactoredProblem& p, const Matrix& u, std::uint64_t seed) {
  return min_eig_estimate(p, FactorMatrix(u), 1e-10, 500, seed, false).value;
}

}  // namespace

void SolverConfig::validate() const {
  require(std::isfinite(step_size) && step_size > 0.0, "step_size must be > 0");
  require(shrink > 0.0 && shrink < 1.0, "shrink must lie in (0, 1)");
  require(armijo > 0.0 && armijo < 1.0, "armijo must lie in (0, 1)");
  require(max_backtracks >= 1, "max_backtracks must be >= 1");
  require(max_iters >= 0, "max_iters must be >= 0");
  require(std::isfinite(grad_tol) && grad_tol > 0.0, "grad_tol must be > 0");
  require(perturb_radius > 0.0, "perturb_radius must be > 0");
  require(perturb_patience >= 1, "perturb_patience must be >= 1");
  require(max_perturbations >= 0, "max_perturbations must be >= 0");
  require(neg_curv_tol >= 0.0, "neg_curv_tol must be >= 0");
  require(std::isfinite(init_scale), "init_scale must be finite");
}

std::string_view to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iters: return "max-iters";
    case SolverStatus::stalled: return "stalled";
    case SolverStatus::suspected_saddle: return "suspected-saddle";
    case SolverStatus::diverged: return "diverged";
  }
  return "?";
}

FactorMatrix random_init(Index n, Index r, double scale, Rng& rng) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ContractError("random_init: scale must be > 0");
  if (n < 1 || r < 1) throw DimensionError("random_init: need n, r >= 1");
  return FactorMatrix(gaussian_matrix(n, r, rng, scale / std::sqrt(static_cast<double>(n))));
}

double default_init_scale(const Objective& obj) {
  const Matrix zero = Matrix::Zero(obj.dim(), obj.dim());
  const double gn = obj.gradient(zero).norm();
  return gn > 0.0 && std::isfinite(gn) ? std::pow(gn, 0.25) : 1.0;
}

double fixed_step_size(const FactorMatrix& u0, double big_m) {
  const Vector sv = singular_values(u0.mat());
  if (!(big_m > 0.0)) throw ContractError("fixed_step_size: need M > 0");
  if (sv.size() == 0 || !(sv(0) > 0.0)) throw ContractError("fixed_step_size: U0 is zero");
  return 1.0 / (4.0 * big_m * sv(0) * sv(0));
}

SolverResult gradient_descent(const FactoredProblem& p, const FactorMatrix& u0,
                              const SolverConfig& cfg, const std::optional<Matrix>& xstar) {
  cfg.validate();
  p.check_factor(u0, "gradient_descent");
  SolverResult res;
  res.seed = cfg.seed;
  res.lambda_min = kNaN;
  Iterate cur = evaluate(p, u0.mat(), {});
  if (!std::isfinite(cur.g)) throw DivergenceError("gradient_descent: non-finite g(U0)", {});
  double step = cfg.step_size;

  int it = 0;
  for (;; ++it) {
    const double gn = cur.grad.norm();
    res.trace.records.push_back({it, cur.g, gn, lifted_distance(cur.u, xstar), 0.0, false});
    if (gn <= cfg.grad_tol) {
      res.status = SolverStatus::converged;
      break;
    }
    if (it >= cfg.max_iters) {
      res.status = SolverStatus::max_iters;
      break;
    }
    if (!descend(p, cur, step, cfg, res.trace)) {
      res.status = SolverStatus::stalled;
      break;
    }
    res.trace.records.back().step = step;
    if (!cfg.fixed_step) step = std::min(2.0 * step, kMaxStep);
  }
  res.iterations = it;
  res.g_value = cur.g;
  res.grad_norm = cur.grad.norm();
  res.u = FactorMatrix(std::move(cur.u));
  return res;
}

SolverResult perturbed_gradient_descent(const FactoredProblem& p, const FactorMatrix& u0,
                                        const SolverConfig& cfg,
                                        const std::optional<Matrix>& xstar) {
  cfg.validate();
  p.check_factor(u0, "perturbed_gradient_descent");
  SolverResult res;
  res.seed = cfg.seed;
  res.lambda_min = kNaN;
  Rng rng(derive_seed(cfg.seed, 0x70657274ULL));
  Iterate cur = evaluate(p, u0.mat(), {});
  if (!std::isfinite(cur.g)) throw DivergenceError("perturbed_gradient_descent: non-finite g(U0)", {});
  double step = cfg.step_size;
  int window_start = 0;
  double window_g = cur.g;
  std::uint64_t eig_calls = 0;

  auto perturb = [&] {
    const double radius = cfg.perturb_radius * (1.0 + cur.u.norm());
    cur = evaluate(p, cur.u + uniform_ball(cur.u.rows(), cur.u.cols(), radius, rng), res.trace);
    res.trace.records.back().perturbed = true;
    ++res.trace.perturbations;
    step = cfg.step_size;
  };

  int it = 0;
  for (;; ++it) {
    const double gn = cur.grad.norm();
    res.trace.records.push_back({it, cur.g, gn, lifted_distance(cur.u, xstar), 0.0, false});
    if (gn <= cfg.grad_tol) {
      res.lambda_min = lambda_min_at(p, cur.u, derive_seed(cfg.seed, 1, eig_calls++));
      if (res.lambda_min >= -cfg.neg_curv_tol) {
        res.status = SolverStatus::converged;
        break;
      }
      if (res.trace.perturbations >= cfg.max_perturbations || it >= cfg.max_iters) {
        res.status = SolverStatus::suspected_saddle;
        break;
      }
      perturb();
      window_start = it;
      window_g = cur.g;
      continue;
    }
    if (it >= cfg.max_iters) {
      res.status = SolverStatus::max_iters;
      break;
    }
    if (it - window_start >= cfg.perturb_patience) {
      const double drop = window_g - cur.g;
      if (drop <= kProgressFraction * std::max(std::abs(window_g), 1e-300) &&
          res.trace.perturbations < cfg.max_perturbations) {
        res.lambda_min = lambda_min_at(p, cur.u, derive_seed(cfg.seed, 1, eig_calls++));
        if (res.lambda_min < -cfg.neg_curv_tol) {
          perturb();
          window_start = it;
          window_g = cur.g;
          continue;
        }
      }
      window_start = it;
      window_g = cur.g;
    }
    if (!descend(p, cur, step, cfg, res.trace)) {
      res.lambda_min = lambda_min_at(p, cur.u, derive_seed(cfg.seed, 1, eig_calls++));
      if (res.lambda_min < -cfg.neg_curv_tol && res.trace.perturbations < cfg.max_perturbations) {
        perturb();
        window_start = it;
        window_g = cur.g;
        continue;
      }
      res.status = SolverStatus::stalled;
      break;
    }
    res.trace.records.back().step = step;
    if (!cfg.fixed_step) step = std::min(2.0 * step, kMaxStep);
  }
  res.iterations = it;
  res.perturbations = res.trace.perturbations;
  res.g_value = cur.g;
  res.grad_norm = cur.grad.norm();
  res.u = FactorMatrix(std::move(cur.u));
  return res;
}

SolverResult solve_start(const FactoredProblem& p, const SolverConfig& cfg, std::uint64_t k,
                         const std::optional<Matrix>& xstar) {
  Rng rng(derive_seed(cfg.seed, 0, k));
  const double scale = cfg.init_scale > 0.0 ? cfg.init_scale : default_init_scale(p.objective());
  const FactorMatrix u0 = random_init(p.n(), p.r(), scale, rng);
  SolverConfig run_cfg = cfg;
  run_cfg.seed = derive_seed(cfg.seed, 1, k);
  try {
    SolverResult res = perturbed_gradient_descent(p, u0, run_cfg, xstar);
    res.seed = run_cfg.seed;
    return res;
  } catch (const DivergenceError& e) {
    SolverResult res;
    res.u = u0;
    res.status = SolverStatus::diverged;
    res.seed = run_cfg.seed;
    res.g_value = kNaN;
    res.grad_norm = kNaN;
    res.lambda_min = kNaN;
    res.trace = e.trace();
    res.iterations = static_cast<int>(res.trace.records.size());
    res.perturbations = res.trace.perturbations;
    return res;
  }
}

MultiStartResult solve_to_global(const FactoredProblem& p, const SolverConfig& cfg, int n_starts,
                                 const std::optional<Matrix>& xstar, int jobs) {
  if (n_starts < 1) throw ContractError("solve_to_global: n_starts must be >= 1");
  cfg.validate();
  MultiStartResult out;
  out.runs.resize(static_cast<std::size_t>(n_starts));
  parallel_for(out.runs.size(), jobs,
               [&](std::size_t k) { out.runs[k] = solve_start(p, cfg, k, xstar); });

  double best_g = std::numeric_limits<double>::infinity();
  bool have = false;
  for (std::size_t k = 0; k < out.runs.size(); ++k) {
    const SolverResult& r = out.runs[k];
    if (r.success()) out.any_success = true;
  }
  for (std::size_t k = 0; k < out.runs.size(); ++k) {
    const SolverResult& r = out.runs[k];
    if (out.any_success && !r.success()) continue;
    if (!std::isfinite(r.g_value)) continue;
    if (!have || r.g_value < best_g) {
      best_g = r.g_value;
      out.best_index = k;
      have = true;
    }
  }
  out.best = out.runs[out.best_index];
  return out;
}

Proposition1Report verify_proposition1(const ObjectivePtr& obj, Index r, int trials,
                                       const SolverConfig& cfg, double tol) {
  if (trials < 1) throw ContractError("verify_proposition1: trials must be >= 1");
  const FactoredProblem p(obj, r);
  const MultiStartResult ms = solve_to_global(p, cfg, trials);
  Proposition1Report rep;
  rep.trials = trials;
  double max_norm = 0.0;
  for (const SolverResult& run : ms.runs) {
    rep.seeds.push_back(run.seed);
    if (!run.success()) {
      rep.indeterminate = true;
      continue;
    }
    ++rep.succeeded;
    rep.optima.push_back(lift(run.u).mat());
    max_norm = std::max(max_norm, rep.optima.back().norm());
  }
  for (std::size_t i = 0; i < rep.optima.size(); ++i) {
    for (std::size_t j = i + 1; j < rep.optima.size(); ++j) {
      rep.max_pairwise_distance =
          std::max(rep.max_pairwise_distance, (rep.optima[i] - rep.optima[j]).norm());
    }
  }
  rep.unique = rep.succeeded == trials && rep.max_pairwise_distance <= tol * (1.0 + max_norm);
  return rep;
}

}  // namespace bmland
