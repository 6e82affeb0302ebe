#pragma once

// Experiment runner behind the command-line tool: JSON config in, JSON report
// plus trial and trace CSVs out.

#include "bmland/solver_config.hpp"
#include "bmland/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmland::harness {

/// Malformed or out-of-range configuration. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ObjectiveSpec {
  std::string type = "pca";  // pca | conditioned-quadratic | gaussian-sensing | logistic
  double m = 1.0;
  double big_m = 1.1;
  Index measurements = 0;  // gaussian-sensing p; 0 selects 5 n r
  double ridge = 0.1;
};

struct ExperimentConfig {
  std::string experiment;
  Index n = 0;
  Index r = 0;
  Index r_star = 0;
  ObjectiveSpec objective;
  int trials = 1;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;
  SolverConfig solver;
  std::vector<std::string> checks;
  std::string output_path;

  /// pca-landscape: draw n, r*, r per trial with the configured values as maxima.
  bool randomize = false;
  /// theorem-verify and lemma-suite: critical-point searches per instance.
  int points_per_trial = 12;
  /// theorem-verify: non-global critical points required per instance.
  int min_points = 10;
  /// rsc-estimate sampling.
  int points = 20;
  int directions = 4;

  /// Value of a named tolerance; defaults are filled in by parse_config.
  double tol(const std::string& name) const;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"pca-landscape", "theorem-verify", "lemma-suite",
                                              "sensing-convergence", "rsc-estimate"};
  return names;
}

/// Check names produced by an experiment, in report order.
std::vector<std::string> default_checks(const std::string& experiment);

/// Throws ConfigError on schema violations.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// The config with defaults filled in, as written to the report.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct CheckResult {
  std::string name;
  bool passed = true;
  int evaluated = 0;
  int failures = 0;
  std::string detail;
};

/// One row of the trials CSV. Metrics are experiment-specific but their
/// names and order are fixed per experiment.
struct TrialRecord {
  int trial = 0;
  int point = 0;
  std::uint64_t seed = 0;
  std::string label;
  std::string classification;
  double grad_norm = 0.0;
  double curvature = 0.0;
  double bound = 0.0;
  double lambda_min = 0.0;
  std::vector<std::pair<std::string, double>> metrics;
  /// Outcome of each named check this row is a subject of.
  std::vector<std::pair<std::string, bool>> checks;
  bool passed = true;
  std::string error;
  double runtime_ms = 0.0;
};

struct TraceRow {
  int trial = 0;
  int point = 0;
  int iteration = 0;
  double g_value = 0.0;
  double grad_norm = 0.0;
  double lifted_distance = 0.0;
  double step = 0.0;
  bool perturbed = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;
  std::vector<CheckResult> checks;
  std::vector<TraceRow> trace;
  double wall_ms = 0.0;

  bool passed() const;
};

/// Runs the configured experiment. Trials are distributed over `jobs`
/// threads; the report does not depend on `jobs`.
ExperimentReport run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// printf("%.17g"); empty for NaN.
std::string format_number(double v);

std::string trials_csv(const ExperimentReport& report);
std::string trace_csv(const ExperimentReport& report);
nlohmann::json report_to_json(const ExperimentReport& report);

struct OutputPaths {
  std::string report;
  std::string trials;
  std::string trace;
};

/// report.json -> report.json, report.trials.csv, report.trace.csv
OutputPaths output_paths(const std::string& report_path);

/// Writes all three files, each through a temporary file and a rename.
OutputPaths write_report(const ExperimentReport& report, const std::string& report_path);

}  // namespace bmland::harness
