#pragma once

#include "loe/eval.hpp"
#include "loe/oracle.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

/// Experiment harness: configuration, named presets, and the experiment
/// drivers behind the benchmark CLI.  Every run is identified by
/// (experiment, method, n, c, seed) and is reproducible from its record.
namespace loe {

/// Reported in every run record so results stay traceable to a build.
inline constexpr const char* kVersion = "loe-0.1.0";

enum class Experiment { scalability, consistency, warmstart, clustering,
                        single_run };
enum class Method { loe, ste, gnmds, loe_ste };

std::string to_string(Experiment e);
std::string to_string(Method m);
Experiment parse_experiment(const std::string& name);
Method parse_method(const std::string& name);

/// Flat experiment configuration.  The triplet budget is always derived,
/// m = ceil(c * n * log n), never stored.
struct ExperimentConfig {
  Experiment experiment = Experiment::single_run;
  int n = 100;
  int d = 2;
  int landmarks = 0;      // 0 -> d + 3
  double c = 50.0;        // triplet multiplier
  double epsilon = 0.3;   // LOE-STE stage-1 budget share
  double flip = 0.15;     // label-flip probability (clustered data)
  std::string distribution = "normal";  // normal | uniform | clustered
  Link link = Link::logistic;
  int clusters = 5;
  double separation = 10.0;
  double scale = 1.0;     // synthetic coordinate multiplier
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::vector<Method> methods;   // empty -> experiment default
  std::vector<int> n_sweep;      // scalability cells (empty -> {n})
  std::vector<double> c_sweep;   // consistency cells (empty -> {c})
  std::string out = "runs";
  int workers = 1;               // concurrent runs
  double log_base = 0.0;         // 0 -> natural log in the budget formula

  // Solver knobs (the paper is silent on schedules and stopping rules;
  // they are configuration here and echoed into the run report).
  double c_lambda = 1.0;
  double mle_tol = 1e-6;
  int mle_max_iters = 2000;
  int descent_max_iters = 1000;
  double descent_loss_rtol = 1e-7;
  int descent_patience = 5;
  int trace_every = 1;
  std::uint64_t minibatch = 0;   // 0 = full batch
  std::uint64_t prediction_sample = 200000;
  int exhaustive_prediction_max = 100;  // n at or below -> exhaustive
};

/// ceil(c * n * log n) with the configured log base (default natural).
std::uint64_t triplet_budget(const ExperimentConfig& config, int n);

/// Flat `key = value` configuration text ('#' starts a comment; list
/// values are comma-separated, with `a:b` inclusive integer ranges).
/// Unknown keys raise ParseError.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
/// Applies config text on top of an existing config (the CLI's layering:
/// defaults, then preset, then config file, then flags).
void apply_config_text(ExperimentConfig& config, const std::string& text);
void apply_option(ExperimentConfig& config, const std::string& key,
                  const std::string& value);
std::string serialize_config(const ExperimentConfig& config);

/// Named presets (the paper's protocols at desk scale; `*-full` variants
/// keep the published scales and are meant for long unattended runs).
const std::vector<std::string>& preset_names();
bool is_full_scale_preset(const std::string& name);
ExperimentConfig preset(const std::string& name);
std::string preset_text(const std::string& name);

/// Outcome of one (method, cell, seed) run.
struct RunRecord {
  Method method = Method::loe;
  std::uint64_t seed = 0;
  int n = 0;
  int d = 0;
  int landmarks = 0;
  double c = 0.0;
  std::uint64_t m = 0;
  double epsilon = 0.0;
  bool ok = true;
  std::string message;       // failure reason when !ok
  double seconds = 0.0;      // method wall time, metric/file time excluded
  MetricReport metrics;
  std::uint64_t queries = 0;
  bool converged = false;
  std::string stop_reason;   // descent methods
  std::string trace_file;    // trace CSV path, when one was written
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RunRecord> runs;  // deterministic order: cell, method, seed
  bool all_ok = true;
  std::string summary_file;     // one CSV row per run
  std::string means_file;       // per-(method, cell) aggregate CSV
  std::string report_file;      // JSON run report
};

/// Executes the configured protocol over all cells, methods, and seeds
/// (up to `workers` runs concurrently), writes summary.csv, means.csv,
/// report.json, and per-run trace CSVs under config.out, and returns the
/// records.  A failed run is recorded and skipped, not fatal.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Write-to-temp-then-rename, so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace loe
