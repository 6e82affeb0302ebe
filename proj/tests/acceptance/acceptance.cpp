// Runs acceptance criteria 1-10 and prints one PASS/FAIL line per criterion.
// Exit status is 0 only when every criterion passes.
#include "bmland/factored.hpp"
#include "bmland/geometry.hpp"
#include "bmland/harness.hpp"
#include "bmland/landscape.hpp"
#include "bmland/objectives.hpp"
#include "bmland/rng.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

using namespace bmland;
using harness::ExperimentReport;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Run {
  harness::ExperimentConfig cfg;
  ExperimentReport report;
  double seconds = 0.0;
};

Run run(const json& j) {
  Run r;
  r.cfg = harness::parse_config(j);
  const auto t0 = Clock::now();
  r.report = harness::run_experiment(r.cfg, jobs());
  r.seconds = seconds_since(t0);
  return r;
}

const harness::CheckResult* find_check(const ExperimentReport& rep, const std::string& name) {
  for (const auto& c : rep.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool no_error_rows(const ExperimentReport& rep) {
  for (const auto& t : rep.trials) {
    if (!t.error.empty()) return false;
  }
  return true;
}

// All named checks passed with at least one subject each; appends "name ok/n" to detail.
bool checks_pass(const Run& r, const std::vector<std::string>& names, std::string& detail) {
  bool ok = no_error_rows(r.report);
  for (const auto& name : names) {
    const harness::CheckResult* c = find_check(r.report, name);
    if (c == nullptr) {
      detail += " " + name + " missing";
      ok = false;
      continue;
    }
    const bool pass = c->passed && c->evaluated > 0;
    char buf[160];
    std::snprintf(buf, sizeof buf, " %s %d/%d", name.c_str(), c->evaluated - c->failures,
                  c->evaluated);
    detail += buf;
    ok = ok && pass;
  }
  return ok;
}

int failures = 0;

void report(int id, const char* title, bool ok, double secs, const std::string& detail) {
  std::printf("criterion %2d %s  %-38s %8.3fs %s\n", id, ok ? "PASS" : "FAIL", title, secs,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

json landscape_config() {
  return {{"experiment", "pca-landscape"}, {"n", 10},     {"r", 4},
          {"r_star", 3},                   {"randomize", true},
          {"objective", {{"type", "pca"}}}, {"trials", 20}, {"seed", 20240601}};
}

json theorem_config(double big_m, std::uint64_t seed) {
  return {{"experiment", "theorem-verify"},
          {"n", 12},
          {"r", 2},
          {"r_star", 2},
          {"objective", {{"type", "conditioned-quadratic"}, {"m", 1.0}, {"M", big_m}}},
          {"trials", 1},
          {"seed", seed},
          {"points_per_trial", 12},
          {"min_points", 10}};
}

json lemma_config() {
  return {{"experiment", "lemma-suite"},
          {"n", 8},
          {"r", 3},
          {"r_star", 2},
          {"objective", {{"type", "conditioned-quadratic"}, {"m", 1.0}, {"M", 1.1}}},
          {"trials", 1000},
          {"seed", 3}};
}

json convergence_config() {
  return {{"experiment", "sensing-convergence"},
          {"n", 12},
          {"r", 2},
          {"r_star", 2},
          {"objective", {{"type", "conditioned-quadratic"}, {"m", 1.0}, {"M", 1.1}}},
          {"trials", 50},
          {"seed", 11},
          {"solver", {{"max_iters", 20000}, {"grad_tol", 1e-10}}}};
}

void criterion2() {
  const auto t0 = Clock::now();
  Matrix x = Matrix::Zero(3, 3);
  x(0, 0) = 2.0;
  const FactoredProblem p(std::make_shared<PcaObjective>(LiftedMatrix(x)), 1);
  Matrix us = Matrix::Zero(3, 1);
  us(0, 0) = std::sqrt(2.0);
  const CriticalPointReport rep =
      classify_critical_point(p, FactorMatrix::zeros(3, 1), FactorMatrix(us), 1.0);
  const double bound = rep.bound ? rep.bound->value : std::nan("");
  const bool ok = std::abs(rep.curvature_along_d + 8.0) <= 1e-10 &&
                  std::abs(bound + 0.296) <= 1e-10 &&
                  std::abs(rep.lambda_min_estimate + 4.0) <= 1e-8;
  char buf[200];
  std::snprintf(buf, sizeof buf, " curvature %.17g bound %.17g lambda_min %.17g",
                rep.curvature_along_d, bound, rep.lambda_min_estimate);
  report(2, "closed-form anchor", ok, seconds_since(t0), buf);
}

void criterion6() {
  const auto t0 = Clock::now();
  const Index n = 6, r = 2;
  Rng rng(606);
  std::vector<ObjectivePtr> objs;
  const PlantedTarget pt = plant_low_rank_target(n, r, rng);
  objs.push_back(std::make_shared<PcaObjective>(pt.x));
  objs.push_back(ConditionedQuadratic::create(pt.x, 1.0, 1.15, 61));
  objs.push_back(GaussianSensing::create(pt.x, 5 * n * r, 62));
  Matrix signs(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      signs(i, j) = signs(j, i) = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
    }
  }
  objs.push_back(LogisticPca::create(signs, 0.1));

  double worst_grad = 0.0, worst_hess = 0.0, worst_split = 0.0;
  for (const auto& obj : objs) {
    const FactoredProblem p(obj, r);
    for (int k = 0; k < 20; ++k) {
      const FactorMatrix u(gaussian_matrix(n, r, rng));
      const FactorMatrix d(gaussian_matrix(n, r, rng));
      worst_grad = std::max(worst_grad, oracle::rel_err(fd_gradient(p, u), g_gradient(p, u).mat()));
      const double exact = g_hess_bilinear(p, u, d, d);
      worst_hess = std::max(worst_hess, oracle::rel_err(fd_hess_bilinear(p, u, d), exact));
      const double split = g_hess_split(p, u, d).total();
      worst_split = std::max(worst_split, std::abs(split - exact) / std::max(std::abs(exact), 1e-300));
    }
  }
  const bool ok = worst_grad <= 1e-6 && worst_hess <= 1e-5 && worst_split <= 1e-10;
  char buf[200];
  std::snprintf(buf, sizeof buf, " objectives 4 points 20 grad %.3g hess %.3g split %.3g",
                worst_grad, worst_hess, worst_split);
  report(6, "derivative oracles", ok, seconds_since(t0), buf);
}

bool same_csv(const Run& r) {
  const ExperimentReport again = harness::run_experiment(r.cfg, 1);
  return harness::trials_csv(again) == harness::trials_csv(r.report) &&
         harness::trace_csv(again) == harness::trace_csv(r.report);
}

}  // namespace

int main() {
  const Run landscape = run(landscape_config());
  {
    std::string detail;
    const bool ok = checks_pass(landscape, {"global-classified", "saddles-classified",
                                            "theorem-bound", "example-bound"},
                                detail);
    report(1, "pca landscape enumeration", ok && landscape.seconds < 10.0, landscape.seconds,
           detail);
  }

  criterion2();

  const Run thm_a = run(theorem_config(1.1, 7));
  const Run thm_b = run(theorem_config(1.15, 8));
  {
    const std::vector<std::string> names{"critical-points-found", "saddles-classified",
                                         "theorem-bound", "pi1-lower", "pi2-upper", "pi3-upper"};
    std::string da = " M=1.1:", db = " M=1.15:";
    const bool ok = checks_pass(thm_a, names, da) & checks_pass(thm_b, names, db);
    const double secs = thm_a.seconds + thm_b.seconds;
    report(3, "curvature bound, conditioned quad.", ok && secs < 60.0, secs, da + db);
  }

  const Run lemmas = run(lemma_config());
  {
    std::string detail;
    const bool ok = checks_pass(
        lemmas, {"lifted-distance", "factor-product", "aligned-product", "sqrt-inner"}, detail);
    report(4, "factor inequality suites", ok && lemmas.seconds < 10.0, lemmas.seconds, detail);
  }

  {
    std::string da = " M=1.1:", db = " M=1.15:";
    const bool ok = checks_pass(thm_a, {"lemma3"}, da) & checks_pass(thm_b, {"lemma3"}, db);
    report(5, "projected residual at critical points", ok, 0.0, da + db);
  }

  criterion6();

  const Run conv = run(convergence_config());
  {
    std::string detail;
    const bool ok = checks_pass(conv, {"converged", "recovery", "uniqueness"}, detail);
    report(7, "global convergence", ok && conv.seconds < 120.0, conv.seconds, detail);
  }

  {
    std::string detail;
    const bool ok = checks_pass(landscape, {"escape"}, detail);
    report(8, "saddle escape", ok, 0.0, detail);
  }

  {
    std::string d1 = " landscape:", d3a = " M=1.1:", d3b = " M=1.15:", d7 = " convergence:";
    const bool ok = checks_pass(landscape, {"kkt-global", "kkt-saddle"}, d1) &
                    checks_pass(thm_a, {"kkt-saddle"}, d3a) &
                    checks_pass(thm_b, {"kkt-saddle"}, d3b) & checks_pass(conv, {"kkt-global"}, d7);
    report(9, "kkt certification", ok, 0.0, d1 + d3a + d3b + d7);
  }

  {
    const auto t0 = Clock::now();
    int same = 0, total = 0;
    for (const Run* r : {&landscape, &thm_a, &thm_b, &lemmas, &conv}) {
      ++total;
      same += same_csv(*r) ? 1 : 0;
    }
    char buf[80];
    std::snprintf(buf, sizeof buf, " identical reruns %d/%d", same, total);
    report(10, "determinism", same == total, seconds_since(t0), buf);
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
