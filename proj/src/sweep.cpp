#include "csbm/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "csbm/fullbp.hpp"
#include "csbm/linbp.hpp"
#include "csbm/parallel.hpp"
#include "csbm/rng.hpp"
#include "csbm/spectral.hpp"
#include "csbm/version.hpp"

namespace csbm {

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    out[k] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (count - 1);
  }
  return out;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Mean and standard error of the mean.
std::pair<double, double> mean_se(const std::vector<double>& xs) {
  if (xs.empty()) return {std::nan(""), std::nan("")};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double k = static_cast<double>(xs.size());
  return {mean, std::sqrt(ss / (k - 1.0) / k)};
}

const std::vector<std::string> kColumns = {
    "lambda",   "mu",       "gamma",           "algorithm",        "rejection_rate",
    "mean_overlap", "mean_cov_overlap", "n_runs", "n_failed", "se_rejection_rate",
    "se_mean_overlap", "se_mean_cov_overlap"};

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += ',';
    out += parts[k];
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "linbp") return Algorithm::kLinBP;
  if (name == "fullbp") return Algorithm::kFullBP;
  if (name == "spectral") return Algorithm::kSpectral;
  throw ConfigError("unknown algorithm '" + name + "' (expected linbp, fullbp or spectral)");
}

const char* to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::kLinBP: return "linbp";
    case Algorithm::kFullBP: return "fullbp";
    case Algorithm::kSpectral: return "spectral";
  }
  return "?";
}

RunSummary run_on_instance(Algorithm alg, const Instance& inst, const RunOptions& opts,
                           std::uint64_t seed) {
  RunSummary s;
  s.algorithm = to_string(alg);
  s.lambda = inst.params.lambda;
  s.mu = inst.params.mu;
  s.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  switch (alg) {
    case Algorithm::kLinBP: {
      const auto r = linbp_run(inst, opts.t_max, opts.init_scale, seed, {opts.exact_onsager});
      s.overlap = overlap(r.v_hat, inst.truth.v);
      s.cov_overlap = r.trace.back().cov_overlap;
      s.decision = r.decision;
      break;
    }
    case Algorithm::kFullBP: {
      const auto r = fullbp_run(inst, make_bp_config(inst.params, opts.t_max, opts.init_scale), seed);
      s.overlap = overlap(r.v_hat, inst.truth.v);
      s.cov_overlap = r.trace.back().cov_overlap;
      s.decision = r.decision;
      break;
    }
    case Algorithm::kSpectral: {
      const auto& prm = inst.params;
      SpectralOptions so;
      so.seed = seed;
      const auto r = minimize_xi(make_problem(inst), prm.lambda, prm.mu, prm.gamma, so);
      s.overlap = overlap(r.v_hat, inst.truth.v);
      const Eigen::VectorXd u_hat = inst.covariates * r.v_hat;
      s.cov_overlap = u_hat.norm() > 0.0 ? covariate_overlap(u_hat, inst.truth.u) : 0.0;
      s.decision = gaussian_test(r.t_value, prm.lambda, prm.mu, prm.gamma, opts.delta);
      break;
    }
  }
  s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

void SweepConfig::validate() const {
  if (lambda_count < 1 || mu_count < 1) throw ConfigError("sweep grid must have at least one cell");
  if (lambda_min > lambda_max || mu_min > mu_max) throw ConfigError("sweep grid bounds are reversed");
  if (lambda_min < 0.0) throw ConfigError("lambda must be >= 0");
  if (lambda_max > std::sqrt(d)) throw ConfigError("lambda_max exceeds sqrt(d)");
  if (mu_min < 0.0) throw ConfigError("mu must be >= 0");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (algorithms.empty()) throw ConfigError("no algorithms selected");
  std::set<std::string> seen;
  for (const auto& name : algorithms) {
    const Algorithm alg = parse_algorithm(name);
    if (!seen.insert(name).second) throw ConfigError("algorithm listed twice: " + name);
    if (alg == Algorithm::kSpectral && (lambda_min <= 0.0 || mu_min <= 0.0)) {
      throw ConfigError("spectral sweeps need lambda_min > 0 and mu_min > 0");
    }
  }
  if (run.t_max < 0) throw ConfigError("t_max must be >= 0");
  if (!(run.init_scale >= 0.0)) throw ConfigError("init_scale must be >= 0");
  if (!(run.delta >= 0.0)) throw ConfigError("delta must be >= 0");
  // Dimension and rate checks.
  derive_params(n, p, d, lambda_max, mu_max);
}

std::vector<double> SweepConfig::lambdas() const { return linspace(lambda_min, lambda_max, lambda_count); }
std::vector<double> SweepConfig::mus() const { return linspace(mu_min, mu_max, mu_count); }

nlohmann::json to_json(const SweepConfig& cfg) {
  return {{"lambda_min", cfg.lambda_min},
          {"lambda_max", cfg.lambda_max},
          {"lambda_count", cfg.lambda_count},
          {"mu_min", cfg.mu_min},
          {"mu_max", cfg.mu_max},
          {"mu_count", cfg.mu_count},
          {"n", cfg.n},
          {"p", cfg.p},
          {"d", cfg.d},
          {"runs", cfg.runs},
          {"algorithms", cfg.algorithms},
          {"t_max", cfg.run.t_max},
          {"init_scale", cfg.run.init_scale},
          {"delta", cfg.run.delta},
          {"exact_onsager", cfg.run.exact_onsager},
          {"base_seed", cfg.base_seed},
          {"output_dir", cfg.output_dir}};
}

SweepConfig sweep_config_from_json(const nlohmann::json& j, SweepConfig cfg) {
  if (!j.is_object()) throw ConfigError("sweep config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "lambda_min") cfg.lambda_min = value.get<double>();
      else if (key == "lambda_max") cfg.lambda_max = value.get<double>();
      else if (key == "lambda_count") cfg.lambda_count = value.get<int>();
      else if (key == "mu_min") cfg.mu_min = value.get<double>();
      else if (key == "mu_max") cfg.mu_max = value.get<double>();
      else if (key == "mu_count") cfg.mu_count = value.get<int>();
      else if (key == "n") cfg.n = value.get<std::int64_t>();
      else if (key == "p") cfg.p = value.get<std::int64_t>();
      else if (key == "d") cfg.d = value.get<double>();
      else if (key == "runs") cfg.runs = value.get<int>();
      else if (key == "algorithms") cfg.algorithms = value.get<std::vector<std::string>>();
      else if (key == "t_max") cfg.run.t_max = value.get<std::int64_t>();
      else if (key == "init_scale") cfg.run.init_scale = value.get<double>();
      else if (key == "delta") cfg.run.delta = value.get<double>();
      else if (key == "exact_onsager") cfg.run.exact_onsager = value.get<bool>();
      else if (key == "base_seed") cfg.base_seed = value.get<std::uint64_t>();
      else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
      else throw ConfigError("unknown sweep config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad sweep config: ") + e.what());
  }
  return cfg;
}

std::uint64_t run_seed(const SweepConfig& cfg, std::int64_t cell, int run) {
  return derive_seed(cfg.base_seed, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(run));
}

SweepResult run_sweep(const SweepConfig& cfg, int threads, const SweepHooks& hooks) {
  cfg.validate();
  std::vector<Algorithm> algs;
  for (const auto& name : cfg.algorithms) algs.push_back(parse_algorithm(name));
  const auto lambdas = cfg.lambdas();
  const auto mus = cfg.mus();
  const std::int64_t num_cells = cfg.num_cells();
  const std::int64_t num_tasks = num_cells * cfg.runs;
  const auto num_algs = static_cast<std::int64_t>(algs.size());

  // Each task writes only its own slots.
  std::vector<RunRecord> records(static_cast<std::size_t>(num_tasks * num_algs));
  parallel_for(num_tasks, threads, [&](std::int64_t task) {
    const std::int64_t cell = task / cfg.runs;
    const int run = static_cast<int>(task % cfg.runs);
    // Cells are lambda-major: cell = i_lambda * mu_count + i_mu.
    const double lambda = lambdas[cell / cfg.mu_count];
    const double mu = mus[cell % cfg.mu_count];
    const std::uint64_t seed = run_seed(cfg, cell, run);
    Instance inst;
    std::string setup_error;
    try {
      inst = sample_contextual(derive_params(cfg.n, cfg.p, cfg.d, lambda, mu), seed);
    } catch (const std::exception& e) {
      setup_error = std::string("instance: ") + e.what();
    }
    for (std::int64_t a = 0; a < num_algs; ++a) {
      RunRecord& rec = records[static_cast<std::size_t>(task * num_algs + a)];
      rec.cell = cell;
      rec.run = run;
      rec.summary.algorithm = to_string(algs[a]);
      rec.summary.lambda = lambda;
      rec.summary.mu = mu;
      rec.summary.seed = seed;
      if (!setup_error.empty()) {
        rec.summary.failed = true;
        rec.summary.error = setup_error;
        continue;
      }
      try {
        if (hooks.before_run) hooks.before_run(cell, run, algs[a]);
        rec.summary = run_on_instance(algs[a], inst, cfg.run, seed);
      } catch (const std::exception& e) {
        rec.summary.failed = true;
        rec.summary.error = e.what();
      } catch (...) {
        rec.summary.failed = true;
        rec.summary.error = "unknown exception";
      }
    }
  });

  SweepResult result;
  result.records = std::move(records);
  for (std::int64_t cell = 0; cell < num_cells; ++cell) {
    for (std::int64_t a = 0; a < num_algs; ++a) {
      std::vector<double> reject, ov, cov;
      int failed = 0;
      for (int run = 0; run < cfg.runs; ++run) {
        const auto& s = result.records[static_cast<std::size_t>((cell * cfg.runs + run) * num_algs + a)].summary;
        if (s.failed) {
          ++failed;
          continue;
        }
        reject.push_back(s.decision == Decision::kReject ? 1.0 : 0.0);
        ov.push_back(s.overlap);
        cov.push_back(s.cov_overlap);
      }
      SweepRow row;
      row.lambda = lambdas[cell / cfg.mu_count];
      row.mu = mus[cell % cfg.mu_count];
      row.gamma = cfg.gamma();
      row.algorithm = to_string(algs[a]);
      std::tie(row.rejection_rate, row.se_rejection_rate) = mean_se(reject);
      std::tie(row.mean_overlap, row.se_mean_overlap) = mean_se(ov);
      std::tie(row.mean_cov_overlap, row.se_mean_cov_overlap) = mean_se(cov);
      row.n_runs = static_cast<int>(reject.size());
      row.n_failed = failed;
      result.failed_runs += failed;
      result.rows.push_back(row);
    }
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = std::string(kSweepSchema) + "\n" + join(kColumns) + "\n";
  for (const auto& r : result.rows) {
    out += join({fmt(r.lambda), fmt(r.mu), fmt(r.gamma), r.algorithm, fmt(r.rejection_rate),
                 fmt(r.mean_overlap), fmt(r.mean_cov_overlap), std::to_string(r.n_runs),
                 std::to_string(r.n_failed), fmt(r.se_rejection_rate), fmt(r.se_mean_overlap),
                 fmt(r.se_mean_cov_overlap)}) +
           "\n";
  }
  return out;
}

std::string runs_csv(const SweepResult& result) {
  std::string out = std::string(kSweepSchema) + "\n";
  out += "cell,run,algorithm,lambda,mu,seed,status,decision,overlap,cov_overlap,error\n";
  for (const auto& rec : result.records) {
    const auto& s = rec.summary;
    std::string error = s.error;
    for (char& c : error) {
      if (c == ',' || c == '\n' || c == '\r') c = ' ';
    }
    out += join({std::to_string(rec.cell), std::to_string(rec.run), s.algorithm, fmt(s.lambda),
                 fmt(s.mu), std::to_string(s.seed), s.failed ? "error" : "ok",
                 s.failed ? "" : to_string(s.decision), s.failed ? "" : fmt(s.overlap),
                 s.failed ? "" : fmt(s.cov_overlap), error}) +
           "\n";
  }
  return out;
}

nlohmann::json sweep_manifest(const SweepConfig& cfg, const SweepResult& result) {
  return {{"schema", kSweepSchema},
          {"version", kVersion},
          {"config", to_json(cfg)},
          {"rows", result.rows.size()},
          {"failed_runs", result.failed_runs}};
}

void write_sweep(const SweepConfig& cfg, const SweepResult& result) {
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
  };
  write(dir / "sweep.csv", sweep_csv(result));
  write(dir / "runs.csv", runs_csv(result));
  write(dir / "manifest.json", sweep_manifest(cfg, result).dump(2) + "\n");
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepSchema) {
    throw std::runtime_error("sweep csv: missing '" + std::string(kSweepSchema) + "' header");
  }
  if (!std::getline(in, line) || split(line) != kColumns) {
    throw std::runtime_error("sweep csv: column header mismatch");
  }
  std::vector<SweepRow> rows;
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != kColumns.size()) {
      throw std::runtime_error("sweep csv: line " + std::to_string(line_no) + " has " +
                               std::to_string(f.size()) + " fields");
    }
    try {
      SweepRow r;
      r.lambda = std::stod(f[0]);
      r.mu = std::stod(f[1]);
      r.gamma = std::stod(f[2]);
      r.algorithm = f[3];
      r.rejection_rate = std::stod(f[4]);
      r.mean_overlap = std::stod(f[5]);
      r.mean_cov_overlap = std::stod(f[6]);
      r.n_runs = std::stoi(f[7]);
      r.n_failed = std::stoi(f[8]);
      r.se_rejection_rate = std::stod(f[9]);
      r.se_mean_overlap = std::stod(f[10]);
      r.se_mean_cov_overlap = std::stod(f[11]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw std::runtime_error("sweep csv: bad number on line " + std::to_string(line_no));
    }
  }
  return rows;
}

}  // namespace csbm
