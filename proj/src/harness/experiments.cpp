#include "bmland/harness.hpp"

#include "bmland/landscape.hpp"
#include "bmland/parallel.hpp"
#include "bmland/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace bmland::harness {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct TrialOutput {
  std::vector<TrialRecord> rows;
  std::vector<TraceRow> trace;
};

struct Instance {
  ObjectivePtr objective;
  PlantedTarget target;
  std::optional<SpectrumBounds> spectrum;
};

Instance make_instance(const ObjectiveSpec& spec, Index n, Index r_star, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  Instance inst{nullptr, plant_low_rank_target(n, r_star, rng), std::nullopt};
  if (spec.type == "pca") {
    inst.objective = std::make_shared<PcaObjective>(inst.target.x);
  } else if (spec.type == "conditioned-quadratic") {
    inst.objective = ConditionedQuadratic::create(inst.target.x, spec.m, spec.big_m, derive_seed(seed, 1));
  } else if (spec.type == "gaussian-sensing") {
    const Index p = spec.measurements > 0 ? spec.measurements : 5 * n * std::max<Index>(r_star, 1);
    inst.objective = GaussianSensing::create(inst.target.x, p, derive_seed(seed, 2));
  } else if (spec.type == "logistic") {
    Matrix signs = inst.target.x.mat().unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    inst.objective = LogisticPca::create(std::move(signs), spec.ridge);
  } else {
    throw ConfigError("unknown objective type '" + spec.type + "'");
  }
  inst.spectrum = inst.objective->known_spectrum();
  return inst;
}

std::vector<int> selector_bits(unsigned mask, Index r_star) {
  std::vector<int> sel(static_cast<std::size_t>(r_star));
  for (Index j = 0; j < r_star; ++j) sel[static_cast<std::size_t>(j)] = (mask >> j) & 1u;
  return sel;
}

bool wants(const ExperimentConfig& cfg, const char* check) {
  return std::find(cfg.checks.begin(), cfg.checks.end(), check) != cfg.checks.end();
}

void flag(TrialRecord& row, const ExperimentConfig& cfg, const char* check, bool ok) {
  if (wants(cfg, check)) row.checks.emplace_back(check, ok);
}

void add_kkt(TrialRecord& row, const KktResidual& k) {
  row.metrics.emplace_back("grad_min_eig", k.grad_min_eig);
  row.metrics.emplace_back("complementarity", k.complementarity);
  row.metrics.emplace_back("x_min_eig", k.x_min_eig);
}

void flag_kkt(TrialRecord& row, const ExperimentConfig& cfg, Classification c, const KktResidual& k) {
  if (c == Classification::global_optimum) {
    flag(row, cfg, "kkt-global", k.passes(cfg.tol("kkt")));
  } else if (c == Classification::strict_saddle) {
    flag(row, cfg, "kkt-saddle", k.grad_min_eig < -cfg.tol("saddle_grad_eig"));
  }
}

void append_trace(TrialOutput& out, int trial, int point, const SolverTrace& trace) {
  for (const TraceRecord& r : trace.records) {
    out.trace.push_back({trial, point, r.iteration, r.g_value, r.grad_norm, r.lifted_distance,
                         r.step, r.perturbed});
  }
}

TrialOutput pca_landscape_trial(const ExperimentConfig& cfg, int k) {
  TrialOutput out;
  const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
  Index n = cfg.n, r_star = cfg.r_star, r = cfg.r;
  if (cfg.randomize) {
    Rng dims(derive_seed(seed, 10));
    r_star = std::uniform_int_distribution<Index>(1, cfg.r_star)(dims);
    const Index n_lo = std::min(cfg.n, r_star + 1);
    n = std::uniform_int_distribution<Index>(n_lo, cfg.n)(dims);
    r = std::min<Index>(n, r_star + std::uniform_int_distribution<Index>(0, 1)(dims));
  }
  const Instance inst = make_instance(cfg.objective, n, r_star, seed);
  const FactoredProblem p(inst.objective, r);
  const FactorMatrix ustar = pca_optimal_factor(inst.target.x, r);
  const Index rs = pca_spectrum(inst.target.x).eigenvalues.size();
  const unsigned all_ones = (1u << rs) - 1u;

  ClassifyOptions opts;
  opts.tol = cfg.tol("global");
  for (unsigned mask = 0; mask <= all_ones; ++mask) {
    const auto t0 = Clock::now();
    TrialRecord row;
    row.trial = k;
    row.point = static_cast<int>(mask);
    row.seed = seed;
    std::string label = "s=";
    for (int b : selector_bits(mask, rs)) label += static_cast<char>('0' + b);
    row.label = label;

    const FactorMatrix u = construct_pca_saddle(inst.target.x, r, selector_bits(mask, rs),
                                                derive_seed(seed, 1, mask));
    const CriticalPointReport rep = classify_critical_point(p, u, ustar, 1.0, opts);
    row.classification = std::string(to_string(rep.classification));
    row.grad_norm = rep.grad_norm;
    row.curvature = rep.curvature_along_d;
    row.bound = rep.bound->value;
    row.lambda_min = rep.lambda_min_estimate;
    const double example = -2.0 * rep.bound->sigma_factor() * rep.bound->d_norm_sq;
    row.metrics = {{"n", double(n)},
                   {"r", double(r)},
                   {"r_star", double(rs)},
                   {"r_prime", double(rep.r_prime)},
                   {"sigma_u", rep.bound->sigma_u},
                   {"sigma_star", rep.bound->sigma_star},
                   {"d_norm_sq", rep.bound->d_norm_sq},
                   {"example_bound", example},
                   {"lifted_error", rep.lifted_error.value_or(kNaN)}};
    add_kkt(row, rep.kkt);

    if (mask == all_ones) {
      flag(row, cfg, "global-classified", rep.classification == Classification::global_optimum);
    } else {
      flag(row, cfg, "saddles-classified", rep.classification == Classification::strict_saddle);
      flag(row, cfg, "theorem-bound", rep.curvature_along_d < rep.bound->value + cfg.tol("bound_slack"));
      flag(row, cfg, "example-bound",
           rep.curvature_along_d <= example + cfg.tol("example_slack") * std::abs(example));
      if (wants(cfg, "escape")) {
        Rng prng(derive_seed(seed, 2, mask));
        const FactorMatrix start(
            u.mat() + uniform_ball(u.rows(), u.cols(), cfg.tol("escape_radius"), prng));
        SolverConfig gd = cfg.solver;
        gd.max_iters = static_cast<int>(cfg.tol("escape_iters"));
        gd.grad_tol = std::numeric_limits<double>::min();
        const SolverResult run = gradient_descent(p, start, gd, inst.target.x.mat());
        const double g0 = g_value(p, u);
        double g_min = std::numeric_limits<double>::infinity();
        int hit = -1;
        for (const TraceRecord& t : run.trace.records) {
          if (t.g_value < g_min) g_min = t.g_value;
          if (hit < 0 && t.iteration >= 1 && t.g_value < g0) hit = t.iteration;
        }
        row.metrics.emplace_back("escape_g0", g0);
        row.metrics.emplace_back("escape_g_min", g_min);
        row.metrics.emplace_back("escape_iteration", hit < 0 ? kNaN : double(hit));
        flag(row, cfg, "escape", hit >= 0 && hit <= gd.max_iters);
        append_trace(out, k, row.point, run.trace);
      }
    }
    flag_kkt(row, cfg, rep.classification, rep.kkt);
    row.runtime_ms = elapsed_ms(t0);
    out.rows.push_back(std::move(row));
  }
  return out;
}

// Critical points of an instance found from perturbed PCA-type saddles of the
// same target; starts cycle through every selector except the all-ones one.
struct FoundPoint {
  CriticalSearchResult search;
  std::string label;
};

std::vector<FoundPoint> find_points(const FactoredProblem& p, const LiftedMatrix& xstar,
                                    std::uint64_t seed, int count, double tol_crit, double noise) {
  const Index rs = pca_spectrum(xstar).eigenvalues.size();
  const unsigned n_sel = (1u << rs) - 1u;  // excludes all-ones
  CriticalSearchConfig cs;
  cs.tol_crit = tol_crit;
  std::vector<FoundPoint> points;
  for (int j = 0; j < count; ++j) {
    const unsigned mask = n_sel == 0 ? 0u : static_cast<unsigned>(j) % n_sel;
    const FactorMatrix base =
        construct_pca_saddle(xstar, p.r(), selector_bits(mask, rs), derive_seed(seed, 1, j));
    Rng rng(derive_seed(seed, 2, j));
    const FactorMatrix u0(base.mat() + noise * gaussian_matrix(p.n(), p.r(), rng));
    std::string label = "start s=";
    for (int b : selector_bits(mask, rs)) label += static_cast<char>('0' + b);
    points.push_back({find_critical_point(p, u0, cs), label});
  }
  return points;
}

TrialOutput theorem_verify_trial(const ExperimentConfig& cfg, int k) {
  TrialOutput out;
  const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
  const Instance inst = make_instance(cfg.objective, cfg.n, cfg.r_star, seed);
  const FactoredProblem p(inst.objective, cfg.r);
  const double m = inst.spectrum->m;
  const double big_m = inst.spectrum->big_m;
  const Matrix& xstar = inst.target.x.mat();
  const double tol_crit = cfg.tol("tol_crit");

  const auto t_search = Clock::now();
  const std::vector<FoundPoint> points =
      find_points(p, inst.target.x, seed, cfg.points_per_trial, tol_crit, cfg.tol("start_noise"));
  const double search_ms = elapsed_ms(t_search) / static_cast<double>(points.size());

  int non_global = 0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const auto t0 = Clock::now();
    const CriticalSearchResult& found = points[j].search;
    TrialRecord row;
    row.trial = k;
    row.point = static_cast<int>(j);
    row.seed = seed;
    row.label = points[j].label;
    row.grad_norm = found.grad_norm;
    row.metrics = {{"search_iterations", double(found.iterations)}};
    if (!found.converged) {
      row.classification = "not-critical";
      row.curvature = row.bound = row.lambda_min = kNaN;
      row.runtime_ms = search_ms + elapsed_ms(t0);
      out.rows.push_back(std::move(row));
      continue;
    }
    ClassifyOptions opts;
    opts.tol_crit = tol_crit;
    const CriticalPointReport rep = classify_critical_point(p, found.u, inst.target.factor, m, opts);
    row.classification = std::string(to_string(rep.classification));
    row.curvature = rep.curvature_along_d;
    row.bound = rep.bound->value;
    row.lambda_min = rep.lambda_min_estimate;
    const double dist = *rep.lifted_error;
    const bool is_non_global = dist > cfg.tol("global_distance") * xstar.norm();
    row.metrics.emplace_back("lifted_error", dist);
    row.metrics.emplace_back("r_prime", double(rep.r_prime));
    row.metrics.emplace_back("d_norm_sq", rep.bound->d_norm_sq);
    add_kkt(row, rep.kkt);

    if (is_non_global) {
      ++non_global;
      const PiDiagnostics pi = rep.pi.value_or(PiDiagnostics{});
      const double slack = cfg.tol("pi_slack");
      row.metrics.emplace_back("pi1", pi.pi1);
      row.metrics.emplace_back("pi2", pi.pi2);
      row.metrics.emplace_back("pi3", pi.pi3);
      row.metrics.emplace_back("lifted_gap_sq", pi.lifted_gap_sq);
      row.metrics.emplace_back("du_norm_sq", pi.du_norm_sq);
      flag(row, cfg, "saddles-classified", rep.classification == Classification::strict_saddle);
      flag(row, cfg, "theorem-bound", rep.curvature_along_d < rep.bound->value + cfg.tol("bound_slack"));
      flag(row, cfg, "pi1-lower", pi.pi1 >= m * pi.lifted_gap_sq - slack);
      flag(row, cfg, "pi2-upper", pi.pi2 <= slack);
      flag(row, cfg, "pi3-upper", pi.pi3 <= big_m * pi.du_norm_sq + slack);
    }
    if (wants(cfg, "lemma3")) {
      const InequalityReport l3 =
          check_lemma3(p, found.u, xstar, m, big_m, tol_crit, cfg.tol("lemma3_slack"));
      row.metrics.emplace_back("lemma3_lhs", l3.lhs);
      row.metrics.emplace_back("lemma3_rhs", l3.rhs);
      flag(row, cfg, "lemma3", l3.holds);
    }
    flag_kkt(row, cfg, rep.classification, rep.kkt);
    row.runtime_ms = search_ms + elapsed_ms(t0);
    out.rows.push_back(std::move(row));
  }
  if (!out.rows.empty()) {
    out.rows.front().metrics.emplace_back("instance_non_global", double(non_global));
    flag(out.rows.front(), cfg, "critical-points-found", non_global >= cfg.min_points);
  }
  return out;
}

// Gaussian factor of a random rank in [0, r] and a scale spread over two decades.
Matrix random_factor(Index n, Index r, Rng& rng) {
  const Index rank = std::uniform_int_distribution<Index>(0, std::min(n, r))(rng);
  const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
  if (rank == 0) return Matrix::Zero(n, r);
  return scale * gaussian_matrix(n, rank, rng) * gaussian_matrix(rank, r, rng) /
         std::sqrt(static_cast<double>(rank));
}

TrialRecord inequality_row(int k, int point, std::uint64_t seed, const char* name,
                           const InequalityReport& rep, Index n, Index r) {
  TrialRecord row;
  row.trial = k;
  row.point = point;
  row.seed = seed;
  row.label = name;
  row.classification = rep.holds ? "holds" : "violated";
  row.grad_norm = row.curvature = row.bound = row.lambda_min = kNaN;
  row.metrics = {{"n", double(n)}, {"r", double(r)}, {"lhs", rep.lhs}, {"rhs", rep.rhs}, {"slack", rep.slack}};
  return row;
}

TrialOutput lemma_suite_trial(const ExperimentConfig& cfg, int k) {
  TrialOutput out;
  const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
  Rng rng(derive_seed(seed, 0));
  const Index n = std::uniform_int_distribution<Index>(1, cfg.n)(rng);
  const Index r = std::uniform_int_distribution<Index>(1, std::min(cfg.r, n))(rng);
  const FactorMatrix u1(random_factor(n, r, rng));
  const FactorMatrix u2(random_factor(n, r, rng));
  const double slack = cfg.tol("slack");

  auto run = [&](int point, const char* name, auto&& fn) {
    if (!wants(cfg, name)) return;
    const auto t0 = Clock::now();
    TrialRecord row = inequality_row(k, point, seed, name, fn(), n, r);
    flag(row, cfg, name, row.classification == "holds");
    row.runtime_ms = elapsed_ms(t0);
    out.rows.push_back(std::move(row));
  };
  run(0, "lifted-distance", [&] { return check_lifted_distance(u1, u2, kDefaultRankTol, slack); });
  const FactorMatrix aligned = procrustes_align(u1, u2).aligned;
  run(1, "factor-product",
      [&] { return check_factor_product_bound(u1, aligned, kDefaultRankTol, slack); });
  run(2, "aligned-product", [&] { return check_aligned_product_bound(u1, aligned, slack); });
  run(3, "sqrt-inner", [&] { return check_sqrt_inner_bound(u1, u2, slack); });

  if (wants(cfg, "lemma3")) {
    const auto t0 = Clock::now();
    const Instance inst = make_instance(cfg.objective, cfg.n, cfg.r_star, derive_seed(seed, 3));
    const FactoredProblem p(inst.objective, cfg.r);
    const double tol_crit = cfg.tol("tol_crit");
    const std::vector<FoundPoint> pts =
        find_points(p, inst.target.x, derive_seed(seed, 4), 1, tol_crit, cfg.tol("start_noise"));
    TrialRecord row;
    row.trial = k;
    row.point = 4;
    row.seed = seed;
    row.label = "lemma3";
    row.grad_norm = pts[0].search.grad_norm;
    row.curvature = row.bound = row.lambda_min = kNaN;
    if (!pts[0].search.converged) {
      row.classification = "not-critical";
      row.metrics = {{"n", double(cfg.n)}, {"r", double(cfg.r)}, {"lhs", kNaN}, {"rhs", kNaN}, {"slack", kNaN}};
    } else {
      const InequalityReport l3 =
          check_lemma3(p, pts[0].search.u, inst.target.x.mat(), inst.spectrum->m,
                       inst.spectrum->big_m, tol_crit, cfg.tol("lemma3_slack"));
      row = inequality_row(k, 4, seed, "lemma3", l3, cfg.n, cfg.r);
      row.grad_norm = pts[0].search.grad_norm;
      flag(row, cfg, "lemma3", l3.holds);
    }
    row.runtime_ms = elapsed_ms(t0);
    out.rows.push_back(std::move(row));
  }
  return out;
}

struct SolveContext {
  Instance inst;
  std::optional<Matrix> xstar;
};

TrialOutput sensing_trial(const ExperimentConfig& cfg, const SolveContext& ctx,
                          const FactoredProblem& p, int k, std::vector<Matrix>& lifted) {
  TrialOutput out;
  const auto t0 = Clock::now();
  const SolverResult res = solve_start(p, cfg.solver, static_cast<std::uint64_t>(k), ctx.xstar);
  TrialRecord row;
  row.trial = k;
  row.point = 0;
  row.seed = res.seed;
  row.label = "start";
  row.classification = std::string(to_string(res.status));
  row.grad_norm = res.grad_norm;
  row.curvature = row.bound = kNaN;
  row.lambda_min = res.lambda_min;
  const Matrix x = res.u.mat() * res.u.mat().transpose();
  const double rel = ctx.xstar ? (x - *ctx.xstar).norm() / std::max(ctx.xstar->norm(), 1e-300) : kNaN;
  row.metrics = {{"iterations", double(res.iterations)},
                 {"perturbations", double(res.perturbations)},
                 {"g_value", res.g_value},
                 {"lifted_rel_error", rel}};
  flag(row, cfg, "converged", res.success());
  if (ctx.xstar) flag(row, cfg, "recovery", res.success() && rel <= cfg.tol("recovery"));
  if (res.success()) {
    const KktResidual kkt = kkt_residual(p.objective(), lift(res.u));
    add_kkt(row, kkt);
    flag(row, cfg, "kkt-global", kkt.passes(cfg.tol("kkt")));
    lifted[static_cast<std::size_t>(k)] = x;
  } else {
    add_kkt(row, KktResidual{kNaN, kNaN, kNaN});
  }
  append_trace(out, k, 0, res.trace);
  row.runtime_ms = elapsed_ms(t0);
  out.rows.push_back(std::move(row));
  return out;
}

TrialOutput rsc_trial(const ExperimentConfig& cfg, int k) {
  TrialOutput out;
  const auto t0 = Clock::now();
  const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
  const Instance inst = make_instance(cfg.objective, cfg.n, cfg.r_star, seed);
  Rng rng(derive_seed(seed, 5));
  const RscRssEstimate est = estimate_rsc_rss(*inst.objective, cfg.r, cfg.points, cfg.directions, rng);
  TrialRecord row;
  row.trial = k;
  row.seed = seed;
  row.label = inst.objective->name();
  row.classification = "estimate";
  row.grad_norm = row.curvature = row.bound = row.lambda_min = kNaN;
  row.metrics = {{"m_hat", est.m_hat},
                 {"M_hat", est.big_m_hat},
                 {"ratio", est.ratio()},
                 {"samples", double(est.samples)},
                 {"rank_budget", double(est.rank_budget)}};
  flag(row, cfg, "rsc-positive", est.m_hat > 0.0);
  if (inst.spectrum) {
    const double tol = cfg.tol("spectrum");
    flag(row, cfg, "known-spectrum",
         est.m_hat >= inst.spectrum->m - tol * std::max(1.0, inst.spectrum->m) &&
             est.big_m_hat <= inst.spectrum->big_m + tol * std::max(1.0, inst.spectrum->big_m));
  }
  row.runtime_ms = elapsed_ms(t0);
  out.rows.push_back(std::move(row));
  return out;
}

TrialOutput error_output(int k, std::uint64_t seed, const std::string& what) {
  TrialOutput out;
  TrialRecord row;
  row.trial = k;
  row.seed = seed;
  row.label = "error";
  row.classification = "error";
  row.grad_norm = row.curvature = row.bound = row.lambda_min = kNaN;
  row.passed = false;
  row.error = what;
  out.rows.push_back(std::move(row));
  return out;
}

std::vector<CheckResult> aggregate(const ExperimentConfig& cfg, const std::vector<TrialRecord>& rows) {
  std::vector<CheckResult> checks;
  for (const std::string& name : cfg.checks) {
    CheckResult c;
    c.name = name;
    for (const TrialRecord& row : rows) {
      for (const auto& [check, ok] : row.checks) {
        if (check != name) continue;
        ++c.evaluated;
        if (!ok) {
          if (c.failures == 0) {
            std::ostringstream os;
            os << "first failure at trial " << row.trial << " point " << row.point;
            c.detail = os.str();
          }
          ++c.failures;
        }
      }
    }
    c.passed = c.failures == 0;
    if (c.evaluated == 0) c.detail = "no subjects";
    checks.push_back(std::move(c));
  }
  return checks;
}

}  // namespace

bool ExperimentReport::passed() const {
  for (const CheckResult& c : checks) {
    if (!c.passed) return false;
  }
  for (const TrialRecord& r : trials) {
    if (!r.error.empty()) return false;
  }
  return true;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, int jobs) {
  const auto t0 = Clock::now();
  ExperimentReport report;
  report.config = cfg;
  std::vector<TrialOutput> outputs(static_cast<std::size_t>(cfg.trials));

  std::optional<SolveContext> solve_ctx;
  std::optional<FactoredProblem> solve_problem;
  std::vector<Matrix> lifted;
  if (cfg.experiment == "sensing-convergence") {
    Instance inst = make_instance(cfg.objective, cfg.n, cfg.r_star, derive_seed(cfg.seed, 0x696e7374ULL));
    std::optional<Matrix> xstar = inst.objective->known_minimizer();
    solve_ctx = SolveContext{std::move(inst), std::move(xstar)};
    solve_problem.emplace(solve_ctx->inst.objective, cfg.r);
    lifted.resize(outputs.size());
  }

  parallel_for(outputs.size(), jobs, [&](std::size_t i) {
    const int k = static_cast<int>(i);
    try {
      if (cfg.experiment == "pca-landscape") {
        outputs[i] = pca_landscape_trial(cfg, k);
      } else if (cfg.experiment == "theorem-verify") {
        outputs[i] = theorem_verify_trial(cfg, k);
      } else if (cfg.experiment == "lemma-suite") {
        outputs[i] = lemma_suite_trial(cfg, k);
      } else if (cfg.experiment == "sensing-convergence") {
        outputs[i] = sensing_trial(cfg, *solve_ctx, *solve_problem, k, lifted);
      } else if (cfg.experiment == "rsc-estimate") {
        outputs[i] = rsc_trial(cfg, k);
      } else {
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      outputs[i] = error_output(k, derive_seed(cfg.seed, i), e.what());
    }
  });

  if (solve_ctx && !outputs.empty() && !outputs.front().rows.empty()) {
    double max_pair = 0.0, max_norm = 0.0;
    int count = 0;
    for (std::size_t a = 0; a < lifted.size(); ++a) {
      if (lifted[a].size() == 0) continue;
      ++count;
      max_norm = std::max(max_norm, lifted[a].norm());
      for (std::size_t b = a + 1; b < lifted.size(); ++b) {
        if (lifted[b].size() == 0) continue;
        max_pair = std::max(max_pair, (lifted[a] - lifted[b]).norm());
      }
    }
    const double ref = solve_ctx->xstar ? solve_ctx->xstar->norm() : max_norm;
    TrialRecord& head = outputs.front().rows.front();
    head.metrics.emplace_back("max_pairwise_distance", max_pair);
    flag(head, cfg, "uniqueness", count == cfg.trials && max_pair <= cfg.tol("uniqueness") * ref);
  }

  for (TrialOutput& o : outputs) {
    for (TrialRecord& row : o.rows) {
      for (const auto& c : row.checks) row.passed = row.passed && c.second;
      report.trials.push_back(std::move(row));
    }
    for (TraceRow& t : o.trace) report.trace.push_back(t);
  }
  report.checks = aggregate(cfg, report.trials);
  report.wall_ms = elapsed_ms(t0);
  return report;
}

}  // namespace bmland::harness
