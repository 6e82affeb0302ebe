#include "bmland/harness.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace bmland::harness {

namespace {

using nlohmann::json;

const std::map<std::string, std::vector<std::string>>& check_table() {
  static const std::map<std::string, std::vector<std::string>> table{
      {"pca-landscape",
       {"global-classified", "saddles-classified", "theorem-bound", "example-bound", "kkt-global",
        "kkt-saddle", "escape"}},
      {"theorem-verify",
       {"critical-points-found", "saddles-classified", "theorem-bound", "pi1-lower", "pi2-upper",
        "pi3-upper", "lemma3", "kkt-global", "kkt-saddle"}},
      {"lemma-suite", {"lifted-distance", "factor-product", "aligned-product", "sqrt-inner", "lemma3"}},
      {"sensing-convergence", {"converged", "recovery", "uniqueness", "kkt-global"}},
      {"rsc-estimate", {"rsc-positive", "known-spectrum"}},
  };
  return table;
}

std::map<std::string, double> default_tolerances(const std::string& experiment) {
  std::map<std::string, double> t{{"kkt", 1e-7}, {"saddle_grad_eig", 1e-6}};
  if (experiment == "pca-landscape") {
    t.insert({{"bound_slack", 1e-8},
              {"example_slack", 1e-6},
              {"global", 1e-8},
              {"escape_radius", 1e-3},
              {"escape_iters", 200}});
  } else if (experiment == "theorem-verify") {
    t.insert({{"global_distance", 1e-4},
              {"bound_slack", 1e-8},
              {"pi_slack", 1e-8},
              {"lemma3_slack", 1e-7},
              {"tol_crit", 1e-10},
              {"start_noise", 1e-3}});
  } else if (experiment == "lemma-suite") {
    t.insert({{"slack", 1e-10},
              {"lemma3_slack", 1e-7},
              {"tol_crit", 1e-10},
              {"start_noise", 1e-3}});
  } else if (experiment == "sensing-convergence") {
    t.insert({{"recovery", 1e-4}, {"uniqueness", 1e-6}});
  } else if (experiment == "rsc-estimate") {
    t.insert({{"spectrum", 1e-8}});
  }
  return t;
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) fail(where + ": unknown key '" + it.key() + "'");
  }
}

double get_number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key + " must be a number");
  return v.get<double>();
}

long long get_int(const json& obj, const char* key, long long fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(where + "." + key + " must be an integer");
  return v.get<long long>();
}

std::uint64_t get_seed(const json& obj, const char* key, std::uint64_t fallback,
                       const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  fail(where + "." + key + " must be a non-negative integer");
}

bool get_bool(const json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(where + "." + key + " must be a boolean");
  return v.get<bool>();
}

ObjectiveSpec parse_objective(const json& j) {
  if (!j.is_object()) fail("objective must be an object");
  reject_unknown(j, {"type", "m", "M", "p", "ridge"}, "objective");
  ObjectiveSpec s;
  if (!j.contains("type") || !j.at("type").is_string()) fail("objective.type is required");
  s.type = j.at("type").get<std::string>();
  if (s.type == "pca") {
    s.m = s.big_m = 1.0;
  } else if (s.type == "conditioned-quadratic") {
    s.m = get_number(j, "m", 1.0, "objective");
    s.big_m = get_number(j, "M", 1.1, "objective");
    if (!(s.m > 0.0) || !(s.big_m >= s.m)) fail("objective: need 0 < m <= M");
  } else if (s.type == "gaussian-sensing") {
    const long long p = get_int(j, "p", 0, "objective");
    if (p < 0) fail("objective.p must be >= 1");
    s.measurements = static_cast<Index>(p);
  } else if (s.type == "logistic") {
    s.ridge = get_number(j, "ridge", 0.1, "objective");
    if (!(s.ridge >= 0.0)) fail("objective.ridge must be >= 0");
  } else {
    fail("objective.type '" + s.type + "' is not one of pca, conditioned-quadratic, gaussian-sensing, logistic");
  }
  return s;
}

SolverConfig parse_solver(const json& j, SolverConfig s) {
  if (!j.is_object()) fail("solver must be an object");
  reject_unknown(j,
                 {"step_size", "fixed_step", "shrink", "armijo", "max_backtracks", "max_iters",
                  "grad_tol", "perturb_radius", "perturb_patience", "max_perturbations",
                  "neg_curv_tol", "init_scale", "seed"},
                 "solver");
  const std::string w = "solver";
  s.step_size = get_number(j, "step_size", s.step_size, w);
  s.fixed_step = get_bool(j, "fixed_step", s.fixed_step, w);
  s.shrink = get_number(j, "shrink", s.shrink, w);
  s.armijo = get_number(j, "armijo", s.armijo, w);
  s.max_backtracks = static_cast<int>(get_int(j, "max_backtracks", s.max_backtracks, w));
  s.max_iters = static_cast<int>(get_int(j, "max_iters", s.max_iters, w));
  s.grad_tol = get_number(j, "grad_tol", s.grad_tol, w);
  s.perturb_radius = get_number(j, "perturb_radius", s.perturb_radius, w);
  s.perturb_patience = static_cast<int>(get_int(j, "perturb_patience", s.perturb_patience, w));
  s.max_perturbations = static_cast<int>(get_int(j, "max_perturbations", s.max_perturbations, w));
  s.neg_curv_tol = get_number(j, "neg_curv_tol", s.neg_curv_tol, w);
  s.init_scale = get_number(j, "init_scale", s.init_scale, w);
  s.seed = get_seed(j, "seed", s.seed, w);
  return s;
}

}  // namespace

double ExperimentConfig::tol(const std::string& name) const {
  auto it = tolerances.find(name);
  if (it == tolerances.end()) throw ConfigError("unknown tolerance '" + name + "'");
  return it->second;
}

std::vector<std::string> default_checks(const std::string& experiment) {
  auto it = check_table().find(experiment);
  if (it == check_table().end()) throw ConfigError("unknown experiment '" + experiment + "'");
  return it->second;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) fail("config must be a JSON object");
  reject_unknown(j,
                 {"experiment", "n", "r", "r_star", "objective", "trials", "seed", "tolerances",
                  "solver", "checks", "output_path", "randomize", "points_per_trial", "min_points",
                  "points", "directions"},
                 "config");
  ExperimentConfig c;
  if (!j.contains("experiment") || !j.at("experiment").is_string()) fail("config.experiment is required");
  c.experiment = j.at("experiment").get<std::string>();
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    fail("config.experiment '" + c.experiment + "' is not a known experiment");
  }

  const long long n = get_int(j, "n", -1, "config");
  const long long r = get_int(j, "r", -1, "config");
  if (n < 1) fail("config.n is required and must be >= 1");
  if (r < 1) fail("config.r is required and must be >= 1");
  const long long r_star = get_int(j, "r_star", r, "config");
  if (r > n) fail("config: need r <= n");
  if (r_star < 0 || r_star > r) fail("config: need 0 <= r_star <= r");
  c.n = static_cast<Index>(n);
  c.r = static_cast<Index>(r);
  c.r_star = static_cast<Index>(r_star);

  if (!j.contains("objective")) fail("config.objective is required");
  c.objective = parse_objective(j.at("objective"));

  const long long trials = get_int(j, "trials", 1, "config");
  if (trials < 1) fail("config.trials must be >= 1");
  c.trials = static_cast<int>(trials);
  c.seed = get_seed(j, "seed", 0, "config");

  c.tolerances = default_tolerances(c.experiment);
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) fail("config.tolerances must be an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!c.tolerances.count(it.key())) {
        fail("config.tolerances: unknown tolerance '" + it.key() + "' for " + c.experiment);
      }
      if (!it.value().is_number() || !(it.value().get<double>() >= 0.0)) {
        fail("config.tolerances." + it.key() + " must be a non-negative number");
      }
      c.tolerances[it.key()] = it.value().get<double>();
    }
  }

  c.solver.seed = c.seed;
  if (j.contains("solver")) c.solver = parse_solver(j.at("solver"), c.solver);
  try {
    c.solver.validate();
  } catch (const ContractError& e) {
    fail(e.what());
  }

  const auto allowed = default_checks(c.experiment);
  if (j.contains("checks")) {
    const json& ch = j.at("checks");
    if (!ch.is_array()) fail("config.checks must be an array of names");
    std::set<std::string> seen;
    for (const json& name : ch) {
      if (!name.is_string()) fail("config.checks entries must be strings");
      const std::string s = name.get<std::string>();
      if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
        fail("config.checks: '" + s + "' is not a check of " + c.experiment);
      }
      if (!seen.insert(s).second) fail("config.checks: duplicate '" + s + "'");
      c.checks.push_back(s);
    }
    if (c.checks.empty()) fail("config.checks must not be empty");
  } else {
    c.checks = allowed;
  }

  if (j.contains("output_path")) {
    if (!j.at("output_path").is_string()) fail("config.output_path must be a string");
    c.output_path = j.at("output_path").get<std::string>();
  }
  c.randomize = get_bool(j, "randomize", false, "config");
  c.points_per_trial = static_cast<int>(get_int(j, "points_per_trial", c.points_per_trial, "config"));
  c.min_points = static_cast<int>(get_int(j, "min_points", c.min_points, "config"));
  c.points = static_cast<int>(get_int(j, "points", c.points, "config"));
  c.directions = static_cast<int>(get_int(j, "directions", c.directions, "config"));
  if (c.points_per_trial < 1 || c.min_points < 0 || c.points < 1 || c.directions < 1) {
    fail("config: points_per_trial, points and directions must be >= 1, min_points >= 0");
  }

  if ((c.experiment == "pca-landscape") && c.objective.type != "pca") {
    fail("pca-landscape requires objective.type = pca");
  }
  if (c.experiment == "theorem-verify" &&
      !(c.objective.type == "pca" || c.objective.type == "conditioned-quadratic")) {
    fail("theorem-verify needs an objective with known (m, M): pca or conditioned-quadratic");
  }
  if (c.experiment == "lemma-suite" && std::find(c.checks.begin(), c.checks.end(), "lemma3") != c.checks.end() &&
      !(c.objective.type == "pca" || c.objective.type == "conditioned-quadratic")) {
    fail("lemma-suite lemma3 needs an objective with known (m, M): pca or conditioned-quadratic");
  }
  if ((c.experiment == "pca-landscape" || c.experiment == "theorem-verify") && c.r_star < 1) {
    fail(c.experiment + " requires r_star >= 1");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
  json obj{{"type", c.objective.type}};
  if (c.objective.type == "conditioned-quadratic") {
    obj["m"] = c.objective.m;
    obj["M"] = c.objective.big_m;
  } else if (c.objective.type == "gaussian-sensing") {
    obj["p"] = c.objective.measurements;
  } else if (c.objective.type == "logistic") {
    obj["ridge"] = c.objective.ridge;
  }
  const SolverConfig& s = c.solver;
  json solver{{"step_size", s.step_size},
              {"fixed_step", s.fixed_step},
              {"shrink", s.shrink},
              {"armijo", s.armijo},
              {"max_backtracks", s.max_backtracks},
              {"max_iters", s.max_iters},
              {"grad_tol", s.grad_tol},
              {"perturb_radius", s.perturb_radius},
              {"perturb_patience", s.perturb_patience},
              {"max_perturbations", s.max_perturbations},
              {"neg_curv_tol", s.neg_curv_tol},
              {"init_scale", s.init_scale},
              {"seed", s.seed}};
  json tol = json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  json out{{"experiment", c.experiment},
           {"n", c.n},
           {"r", c.r},
           {"r_star", c.r_star},
           {"objective", obj},
           {"trials", c.trials},
           {"seed", c.seed},
           {"tolerances", tol},
           {"solver", solver},
           {"checks", c.checks},
           {"randomize", c.randomize},
           {"points_per_trial", c.points_per_trial},
           {"min_points", c.min_points},
           {"points", c.points},
           {"directions", c.directions}};
  if (!c.output_path.empty()) out["output_path"] = c.output_path;
  return out;
}

}  // namespace bmland::harness
