#include "bmland/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace bmland::harness {

namespace {

using nlohmann::json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<std::string> metric_columns(const std::vector<TrialRecord>& rows) {
  std::vector<std::string> names;
  for (const TrialRecord& r : rows) {
    for (const auto& m : r.metrics) {
      if (std::find(names.begin(), names.end(), m.first) == names.end()) names.push_back(m.first);
    }
  }
  return names;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trials_csv(const ExperimentReport& report) {
  const std::vector<std::string> metrics = metric_columns(report.trials);
  std::ostringstream os;
  os << "trial,point,seed,label,classification,grad_norm,curvature,bound,lambda_min";
  for (const std::string& m : metrics) os << ',' << m;
  os << ",passed,error\n";
  for (const TrialRecord& r : report.trials) {
    os << r.trial << ',' << r.point << ',' << r.seed << ',' << csv_field(r.label) << ','
       << csv_field(r.classification) << ',' << format_number(r.grad_norm) << ','
       << format_number(r.curvature) << ',' << format_number(r.bound) << ','
       << format_number(r.lambda_min);
    for (const std::string& m : metrics) {
      os << ',';
      for (const auto& [name, value] : r.metrics) {
        if (name == m) {
          os << format_number(value);
          break;
        }
      }
    }
    os << ',' << (r.passed ? 1 : 0) << ',' << csv_field(r.error) << '\n';
  }
  return os.str();
}

std::string trace_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "trial,point,iteration,g_value,grad_norm,lifted_distance,step,perturbed\n";
  for (const TraceRow& t : report.trace) {
    os << t.trial << ',' << t.point << ',' << t.iteration << ',' << format_number(t.g_value) << ','
       << format_number(t.grad_norm) << ',' << format_number(t.lifted_distance) << ','
       << format_number(t.step) << ',' << (t.perturbed ? 1 : 0) << '\n';
  }
  return os.str();
}

json report_to_json(const ExperimentReport& report) {
  json checks = json::array();
  for (const CheckResult& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"evaluated", c.evaluated},
                      {"failures", c.failures},
                      {"detail", c.detail}});
  }
  json trials = json::array();
  for (const TrialRecord& r : report.trials) {
    json metrics = json::object();
    for (const auto& [name, value] : r.metrics) metrics[name] = number(value);
    json row_checks = json::object();
    for (const auto& [name, ok] : r.checks) row_checks[name] = ok;
    json row{{"trial", r.trial},
             {"point", r.point},
             {"seed", r.seed},
             {"label", r.label},
             {"classification", r.classification},
             {"grad_norm", number(r.grad_norm)},
             {"curvature", number(r.curvature)},
             {"bound", number(r.bound)},
             {"lambda_min", number(r.lambda_min)},
             {"metrics", metrics},
             {"checks", row_checks},
             {"passed", r.passed},
             {"runtime_ms", r.runtime_ms}};
    if (!r.error.empty()) row["error"] = r.error;
    trials.push_back(std::move(row));
  }
  return json{{"experiment", report.config.experiment},
              {"config", config_to_json(report.config)},
              {"passed", report.passed()},
              {"checks", checks},
              {"trials", trials},
              {"timing", {{"wall_ms", report.wall_ms}}}};
}

OutputPaths output_paths(const std::string& report_path) {
  std::filesystem::path p(report_path);
  std::filesystem::path stem = p;
  if (p.extension() == ".json") stem.replace_extension();
  return {p.string(), stem.string() + ".trials.csv", stem.string() + ".trace.csv"};
}

OutputPaths write_report(const ExperimentReport& report, const std::string& report_path) {
  const OutputPaths paths = output_paths(report_path);
  write_atomic(paths.trials, trials_csv(report));
  write_atomic(paths.trace, trace_csv(report));
  write_atomic(paths.report, report_to_json(report).dump(2) + "\n");
  return paths;
}

}  // namespace bmland::harness
