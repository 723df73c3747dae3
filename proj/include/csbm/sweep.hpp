#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "csbm/metrics.hpp"
#include "csbm/model.hpp"

namespace csbm {

enum class Algorithm { kLinBP, kFullBP, kSpectral };

/// "linbp", "fullbp" or "spectral"; ConfigError otherwise.
Algorithm parse_algorithm(const std::string& name);
const char* to_string(Algorithm alg);

struct RunOptions {
  std::int64_t t_max = 50;
  double init_scale = 0.01;
  double delta = 0.05;  // spectral test margin
  bool exact_onsager = false;
};

/// One algorithm on one sparse instance, with message initialization drawn
/// from `seed`. Spectral uses the centered adjacency and needs lambda, mu > 0.
RunSummary run_on_instance(Algorithm alg, const Instance& inst, const RunOptions& opts,
                           std::uint64_t seed);

struct SweepConfig {
  double lambda_min = 0.0;
  double lambda_max = 1.0;
  int lambda_count = 11;
  double mu_min = 0.0;
  double mu_max = 1.0;
  int mu_count = 11;
  std::int64_t n = 800;
  std::int64_t p = 1000;
  double d = 5.0;
  int runs = 20;
  std::vector<std::string> algorithms{"fullbp"};
  RunOptions run;
  std::uint64_t base_seed = 0;
  std::string output_dir = "sweep_out";

  /// Throws ConfigError on empty grids, lambda_max > sqrt(d), negative mu,
  /// runs < 1, unknown algorithms, or spectral on a grid touching lambda = 0
  /// or mu = 0.
  void validate() const;
  double gamma() const { return static_cast<double>(n) / static_cast<double>(p); }
  std::vector<double> lambdas() const;
  std::vector<double> mus() const;
  std::int64_t num_cells() const { return static_cast<std::int64_t>(lambda_count) * mu_count; }
};

nlohmann::json to_json(const SweepConfig& cfg);

/// Missing keys keep their defaults; unknown keys are a ConfigError.
SweepConfig sweep_config_from_json(const nlohmann::json& j, SweepConfig base = {});

/// Seed of run `run` in grid cell `cell`; shared by every algorithm so they
/// see the same instance.
std::uint64_t run_seed(const SweepConfig& cfg, std::int64_t cell, int run);

struct RunRecord {
  std::int64_t cell = 0;
  int run = 0;
  RunSummary summary;
};

struct SweepRow {
  double lambda = 0.0;
  double mu = 0.0;
  double gamma = 0.0;
  std::string algorithm;
  double rejection_rate = 0.0;
  double mean_overlap = 0.0;
  double mean_cov_overlap = 0.0;
  int n_runs = 0;  // successful runs
  int n_failed = 0;
  double se_rejection_rate = 0.0;
  double se_mean_overlap = 0.0;
  double se_mean_cov_overlap = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // cell-major, then config algorithm order
  std::vector<RunRecord> records;
  int failed_runs = 0;
};

struct SweepHooks {
  /// Called before each (cell, run, algorithm); exceptions it throws are
  /// treated like algorithm failures. Used to test crash isolation.
  std::function<void(std::int64_t cell, int run, Algorithm alg)> before_run;
};

/// Runs every (cell, run) pair on `threads` workers. Failures are recorded
/// per run; the sweep never aborts on them.
SweepResult run_sweep(const SweepConfig& cfg, int threads, const SweepHooks& hooks = {});

inline constexpr const char* kSweepSchema = "# csbm-sweep v1";

std::string sweep_csv(const SweepResult& result);
std::string runs_csv(const SweepResult& result);
nlohmann::json sweep_manifest(const SweepConfig& cfg, const SweepResult& result);

/// Writes sweep.csv, runs.csv and manifest.json into cfg.output_dir.
void write_sweep(const SweepConfig& cfg, const SweepResult& result);

/// Parses a sweep.csv; throws std::runtime_error on a schema mismatch.
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

}  // namespace csbm
