#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oudiff/types.hpp"

namespace oudiff {

// The nine runnable experiments.
enum class ExperimentId {
  GueSemicircle,
  GinibreDisc,
  OverlapLaw,
  EdgeErfc,
  AcpVerify,
  QdetVerify,
  DysonTrajectories,
  TwoByTwo,
  PdeResiduals,
};

const char* experiment_name(ExperimentId id);
std::optional<ExperimentId> experiment_from_name(const std::string& name);
std::vector<ExperimentId> all_experiments();

// Flat experiment configuration: a small shared parameter vocabulary filled
// with per-experiment defaults, overridable from a key=value file and from
// command-line flags (flags win).
struct ExperimentConfig {
  ExperimentId id = ExperimentId::GueSemicircle;
  OUParams params;          // a, n, dt, seed
  long samples = 0;         // Monte Carlo samples or ensemble size
  long trials = 0;          // trajectory count where applicable
  double tau = 0.0;         // diffusion time of sampled batches
  double duration = 0.0;    // trajectory length
  int bins = 0;             // histogram resolution
  double regulator_w = 0.05;  // |w| for generalized-resolvent probes
  bool negative_control = false;  // pde-residuals: run the sign-flipped solver
  std::string out_dir = "out";
  int workers = 0;

  void validate() const;
  std::string canonical_string() const;  // key=value lines, sorted keys
  std::string hash() const;              // FNV-1a of the canonical string
};

// Defaults for an experiment; `overrides` maps flat keys (experiment, seed,
// n, a, dt, samples, trials, tau, duration, bins, w, negative_control, out,
// workers) to values. Unknown keys or malformed values throw ConfigError.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig default_config(ExperimentId id);
ExperimentConfig parse_config(
    const std::string& config_path,
    const std::map<std::string, std::string>& overrides);

// One comparison row: simulation against closed form at one coordinate.
struct ReportRow {
  std::string label;
  double coordinate = 0.0;
  double simulated = 0.0;
  double se = 0.0;
  double theory = 0.0;
  double deviation_se = 0.0;  // |simulated - theory| / se (0 when se == 0)
};

struct ComparisonReport {
  std::string experiment;
  bool passed = false;
  double metric = 0.0;        // headline statistic
  double metric_limit = 0.0;  // its declared tolerance
  std::string metric_name;
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
  std::uint64_t seed = 0;
  std::string config_hash;
  double wall_seconds = 0.0;
};

// Executes the experiment, writes one CSV per observable plus a JSON summary
// and a plain-text report under config.out_dir, and returns the report.
ComparisonReport run_experiment(const ExperimentConfig& config);

// Exit codes for the command line front end.
enum ExitCode : int {
  kExitPass = 0,
  kExitToleranceFail = 1,
  kExitConfigError = 2,
  kExitRuntimeFail = 3,
};

}  // namespace oudiff
