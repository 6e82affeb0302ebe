#include "bmland/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>

namespace {

namespace h = bmland::harness;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
  bool quiet = false;
};

int run(const std::string& experiment, const Options& opt) {
  h::ExperimentConfig cfg;
  try {
    cfg = h::load_config(opt.config);
  } catch (const h::ConfigError& e) {
    std::cerr << "bmland: " << e.what() << "\n";
    return kExitUsage;
  }
  if (cfg.experiment != experiment) {
    std::cerr << "bmland: config '" << opt.config << "' describes a " << cfg.experiment
              << " experiment, not " << experiment << "\n";
    return kExitUsage;
  }
  if (opt.seed) {
    cfg.seed = *opt.seed;
    cfg.solver.seed = *opt.seed;
  }
  std::string out = opt.out.empty() ? cfg.output_path : opt.out;
  if (out.empty()) out = experiment + ".report.json";
  cfg.output_path = out;

  h::ExperimentReport report;
  try {
    report = h::run_experiment(cfg, opt.jobs);
  } catch (const h::ConfigError& e) {
    std::cerr << "bmland: " << e.what() << "\n";
    return kExitUsage;
  }
  const h::OutputPaths paths = h::write_report(report, out);

  if (!opt.quiet) {
    for (const h::CheckResult& c : report.checks) {
      std::printf("%s %-22s %d/%d%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                  c.evaluated - c.failures, c.evaluated, c.detail.empty() ? "" : "  ",
                  c.detail.c_str());
    }
    int errors = 0;
    for (const h::TrialRecord& r : report.trials) errors += r.error.empty() ? 0 : 1;
    if (errors > 0) std::printf("ERROR %d trial(s) raised; see %s\n", errors, paths.trials.c_str());
    std::printf("report %s\n", paths.report.c_str());
  }
  return report.passed() ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landscape checks for low-rank factored objectives"};
  app.require_subcommand(1);

  const std::map<std::string, std::pair<std::string, std::string>> commands{
      {"verify-theorem", {"theorem-verify", "Curvature bound at numerically found critical points"}},
      {"landscape", {"pca-landscape", "Enumerate and classify PCA critical points"}},
      {"lemmas", {"lemma-suite", "Randomized inequality suites"}},
      {"solve", {"sensing-convergence", "Perturbed gradient descent from random starts"}},
      {"estimate", {"rsc-estimate", "Estimate restricted curvature constants"}},
  };

  Options opt;
  std::uint64_t seed = 0;
  std::string chosen;
  for (const auto& [name, info] : commands) {
    CLI::App* sub = app.add_subcommand(name, info.second);
    sub->add_option("--config", opt.config, "Experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "Override the root seed");
    sub->add_option("--out", opt.out, "Report path; CSVs are written next to it");
    sub->add_option("--jobs", opt.jobs, "Parallel trials")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", opt.quiet, "Only set the exit code");
    sub->callback([&chosen, name = name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) opt.seed = seed;
  }

  try {
    return run(commands.at(chosen).first, opt);
  } catch (const std::exception& e) {
    std::cerr << "bmland: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}
