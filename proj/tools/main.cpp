#include <cstdio>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "oudiff/experiments.hpp"

namespace {

int run_command(const std::map<std::string, std::string>& overrides,
                const std::string& config_path) {
  oudiff::ExperimentConfig config;
  try {
    config = oudiff::parse_config(config_path, overrides);
  } catch (const oudiff::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return oudiff::kExitConfigError;
  }
  try {
    const oudiff::ComparisonReport rep = oudiff::run_experiment(config);
    std::printf("%s: %s  (%s = %g, limit %g)  [%.1f s]\n",
                rep.experiment.c_str(), rep.passed ? "PASS" : "FAIL",
                rep.metric_name.c_str(), rep.metric, rep.metric_limit,
                rep.wall_seconds);
    for (const auto& w : rep.warnings)
      std::printf("  warning: %s\n", w.c_str());
    for (const auto& n : rep.notes) std::printf("  note: %s\n", n.c_str());
    std::printf("  outputs in %s\n", config.out_dir.c_str());
    return rep.passed ? oudiff::kExitPass : oudiff::kExitToleranceFail;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return oudiff::kExitRuntimeFail;
  }
}

void list_command() {
  std::printf("%-20s %5s %6s %9s %7s %6s %9s\n", "experiment", "n", "a",
              "samples", "trials", "tau", "duration");
  for (const auto id : oudiff::all_experiments()) {
    const auto c = oudiff::default_config(id);
    std::printf("%-20s %5d %6.2f %9ld %7ld %6.2f %9.2f\n",
                oudiff::experiment_name(id), c.params.n, c.params.a, c.samples,
                c.trials, c.tau, c.duration);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ornstein-Uhlenbeck random-matrix diffusion experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment");
  std::string experiment, config_path, out_dir;
  std::string seed, n, a, dt, samples, trials, tau, duration, bins, w, workers;
  bool negative_control = false;
  run->add_option("--experiment", experiment, "experiment id (see `list`)");
  run->add_option("--config", config_path, "key=value config file");
  run->add_option("--seed", seed, "root seed (u64)");
  run->add_option("--n", n, "matrix dimension");
  run->add_option("--a", a, "confinement strength");
  run->add_option("--dt", dt, "integrator step");
  run->add_option("--samples", samples, "Monte Carlo samples");
  run->add_option("--trials", trials, "trajectory count");
  run->add_option("--tau", tau, "diffusion time");
  run->add_option("--duration", duration, "trajectory length");
  run->add_option("--bins", bins, "histogram bins");
  run->add_option("--w", w, "generalized-resolvent regulator |w|");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--workers", workers, "worker threads (0 = auto)");
  run->add_flag("--negative-control", negative_control,
                "pde-residuals: run the sign-flipped solver (must fail)");

  auto* list = app.add_subcommand("list", "list experiments with defaults");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    list_command();
    return oudiff::kExitPass;
  }

  std::map<std::string, std::string> overrides;
  auto put = [&](const char* key, const std::string& value) {
    if (!value.empty()) overrides[key] = value;
  };
  put("experiment", experiment);
  put("seed", seed);
  put("n", n);
  put("a", a);
  put("dt", dt);
  put("samples", samples);
  put("trials", trials);
  put("tau", tau);
  put("duration", duration);
  put("bins", bins);
  put("w", w);
  put("out", out_dir);
  put("workers", workers);
  if (negative_control) overrides["negative_control"] = "1";
  return run_command(overrides, config_path);
}
