// Command-line harness: generate, run, sweep, de, theory, report.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "csbm/de.hpp"
#include "csbm/fullbp.hpp"
#include "csbm/io.hpp"
#include "csbm/linbp.hpp"
#include "csbm/parallel.hpp"
#include "csbm/report.hpp"
#include "csbm/spectral.hpp"
#include "csbm/sweep.hpp"
#include "csbm/theory.hpp"
#include "csbm/version.hpp"

namespace {

using nlohmann::json;
using namespace csbm;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json trace_json(const std::vector<StepSummary>& trace) {
  json out = json::array();
  for (const auto& s : trace) {
    out.push_back({{"step", s.step},
                   {"eta_norm", s.eta_norm},
                   {"m_norm", s.m_norm},
                   {"overlap", s.overlap},
                   {"cov_overlap", s.cov_overlap},
                   {"saturated", s.saturated}});
  }
  return out;
}

struct ModelArgs {
  std::int64_t n = 1000;
  std::int64_t p = 1000;
  double d = 5.0;
  double lambda = 0.0;
  double mu = 0.0;
  std::uint64_t seed = 0;
  std::string model = "sbm";
  std::string instance;  // read from file instead of sampling
  CLI::Option* model_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--n", n, "Number of vertices");
    app->add_option("--p", p, "Covariate dimension");
    app->add_option("--d", d, "Average degree (sbm)");
    app->add_option("--lambda", lambda, "Graph signal strength");
    app->add_option("--mu", mu, "Covariate signal strength");
    app->add_option("--seed", seed, "Instance seed");
    model_opt = app->add_option("--model", model, "sbm or gaussian")->check(CLI::IsMember({"sbm", "gaussian"}));
  }

  AnyInstance make() const {
    if (!instance.empty()) {
      AnyInstance inst = read_instance(instance);
      const bool sparse = std::holds_alternative<Instance>(inst);
      // The file decides the model unless --model was given explicitly.
      if (model_opt && model_opt->count() > 0 && sparse != (model == "sbm")) {
        throw ConfigError("--model does not match the instance file");
      }
      return inst;
    }
    if (model == "gaussian") {
      return sample_gaussian(derive_gaussian_params(n, p, lambda, mu), seed);
    }
    return sample_contextual(derive_params(n, p, d, lambda, mu), seed);
  }
};

int cmd_generate(const ModelArgs& m, const std::string& format, const std::string& out) {
  const Format f = parse_format(format);
  if (out.empty()) throw ConfigError("generate needs --out");
  write_instance(out, m.make(), f);
  return kExitOk;
}

struct RunArgs {
  std::string alg = "fullbp";
  std::int64_t t_max = 50;
  double init_scale = 0.01;
  std::optional<std::uint64_t> init_seed;
  bool trace = false;
  bool exact_onsager = false;
  double delta = 0.05;
  std::optional<double> alg_lambda;
  std::optional<double> alg_mu;
  std::string out;
};

int cmd_run(const ModelArgs& m, const RunArgs& r) {
  const Algorithm alg = parse_algorithm(r.alg);
  if (r.t_max < 0) throw ConfigError("--tmax must be >= 0");
  if (!(r.init_scale >= 0.0)) throw ConfigError("--init-scale must be >= 0");
  if (!(r.delta >= 0.0)) throw ConfigError("--delta must be >= 0");
  const AnyInstance any = m.make();
  const ModelParams& prm = std::visit([](const auto& x) -> const ModelParams& { return x.params; }, any);
  const std::uint64_t inst_seed = std::visit([](const auto& x) { return x.seed; }, any);
  const std::uint64_t seed = r.init_seed.value_or(inst_seed);
  const auto& truth = std::visit([](const auto& x) -> const Latents& { return x.truth; }, any);

  json j;
  j["algorithm"] = r.alg;
  j["model"] = std::holds_alternative<Instance>(any) ? "sbm" : "gaussian";
  j["params"] = params_to_json(prm);
  j["instance_seed"] = inst_seed;
  j["seed"] = seed;

  if (alg == Algorithm::kSpectral) {
    // Algorithm parameters default to the data's.
    const double lambda = r.alg_lambda.value_or(prm.lambda);
    const double mu = r.alg_mu.value_or(prm.mu);
    SpectralOptions so;
    so.seed = seed;
    SpectralProblem prob = std::holds_alternative<Instance>(any)
                               ? make_problem(std::get<Instance>(any))
                               : make_problem(std::get<GaussianInstance>(any));
    const SpectralResult res = minimize_xi(prob, lambda, mu, prm.gamma, so);
    j["alg_lambda"] = lambda;
    j["alg_mu"] = mu;
    j["path"] = res.path == SpectralPath::kXiSearch  ? "xi_search"
                : res.path == SpectralPath::kGraphOnly ? "graph_only"
                                                       : "covariate_only";
    if (std::holds_alternative<Instance>(any)) j["extrapolation"] = "sparse graph, beyond the Gaussian-model guarantee";
    j["xi_star"] = res.xi_star;
    j["t_value"] = res.t_value;
    j["bracket"] = {res.bracket_lo, res.bracket_hi};
    j["eig_iters"] = res.eig_iters;
    j["overlap"] = overlap(res.v_hat, truth.v);
    if (res.path == SpectralPath::kXiSearch) {
      j["threshold"] = spectral_null_value(lambda, mu, prm.gamma) + r.delta;
      j["decision"] = to_string(gaussian_test(res.t_value, lambda, mu, prm.gamma, r.delta));
    } else {
      j["threshold"] = nullptr;
      j["decision"] = nullptr;
    }
    emit(j.dump(2) + "\n", r.out);
    return kExitOk;
  }

  if (!std::holds_alternative<Instance>(any)) throw ConfigError(r.alg + " needs --model sbm");
  const Instance& inst = std::get<Instance>(any);
  std::vector<StepSummary> trace;
  if (alg == Algorithm::kLinBP) {
    const auto res = linbp_run(inst, r.t_max, r.init_scale, seed, {r.exact_onsager});
    j["overlap"] = overlap(res.v_hat, truth.v);
    j["cov_overlap"] = res.trace.back().cov_overlap;
    j["decision"] = to_string(res.decision);
    trace = res.trace;
  } else {
    const auto res = fullbp_run(inst, make_bp_config(prm, r.t_max, r.init_scale), seed);
    j["overlap"] = overlap(res.v_hat, truth.v);
    j["cov_overlap"] = res.trace.back().cov_overlap;
    j["decision"] = to_string(res.decision);
    j["saturated"] = res.saturated;
    trace = res.trace;
  }
  j["eta_norm_initial"] = trace.front().eta_norm;
  j["eta_norm_final"] = trace.back().eta_norm;
  if (r.trace) j["trace"] = trace_json(trace);
  emit(j.dump(2) + "\n", r.out);
  return kExitOk;
}

int cmd_sweep(SweepConfig cfg) {
  cfg.validate();
  const SweepResult result = run_sweep(cfg, thread_count());
  write_sweep(cfg, result);
  if (result.failed_runs > 0) {
    std::cerr << "sweep: " << result.failed_runs << " run(s) failed; see runs.csv\n";
    return kExitPartial;
  }
  return kExitOk;
}

struct DEArgs {
  double lambda = 0.0;
  double mu = 0.0;
  double gamma = 1.0;
  double d = 5.0;
  std::int64_t pool = 100000;
  std::int64_t t_max = 10;
  double init_m1 = 0.1;
  double init_m2 = 0.0;
  double init_var = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_de(const DEArgs& a) {
  if (!(a.gamma > 0.0)) throw ConfigError("--gamma must be positive");
  if (!(a.d > 0.0)) throw ConfigError("--d must be positive");
  if (a.lambda < 0.0 || a.mu < 0.0) throw ConfigError("lambda and mu must be >= 0");
  if (a.lambda > std::sqrt(a.d)) throw ConfigError("lambda exceeds sqrt(d)");
  if (a.pool < 2) throw ConfigError("--pool must be >= 2");
  if (a.t_max < 0) throw ConfigError("--tmax must be >= 0");
  if (!(a.init_var >= 0.0)) throw ConfigError("--init-var must be >= 0");
  const DEParams prm{a.lambda, a.mu, a.gamma, a.d};
  const PoolInit init{a.init_m1, a.init_m2, a.init_var, a.init_var};
  const DETrajectory traj = de_run(make_pool(prm, init, a.pool, a.seed), a.t_max, a.seed);
  std::string csv = "# csbm-de v1\nstep,m1,m2,m3,m4,m1_over_sqrt_m3,se_m1,se_m2,se_m3,se_m4\n";
  char buf[512];
  for (std::size_t t = 0; t < traj.moments.size(); ++t) {
    const auto& z = traj.moments[t];
    const auto& s = traj.standard_errors[t];
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", t, z.m1,
                  z.m2, z.m3, z.m4, z.normalized_correlation(), s.m1, s.m2, s.m3, s.m4);
    csv += buf;
  }
  emit(csv, a.out);
  return kExitOk;
}

struct TheoryArgs {
  double lambda = 0.0;
  double mu = 0.0;
  double gamma = 1.0;
  std::optional<double> b;
  double rho = 1.0;
  double tau = 1.0;
  std::string out;
};

int cmd_theory(const TheoryArgs& a) {
  ComparisonParams cp;
  if (a.b) {
    cp.lambda = a.lambda;
    cp.mu = a.mu;
    cp.gamma = a.gamma;
    cp.b = *a.b;
  } else {
    if (!(a.lambda > 0.0)) throw ConfigError("theory: pass --b when lambda = 0");
    cp = ComparisonParams::for_spectral(a.lambda, a.mu, a.gamma);
  }
  cp.rho = a.rho;
  cp.tau = a.tau;
  cp.validate();
  const OptResult opt = predicted_opt(cp);
  json j;
  j["lambda"] = a.lambda;
  j["mu"] = a.mu;
  j["gamma"] = a.gamma;
  j["b"] = cp.b;
  j["rho"] = cp.rho;
  j["tau"] = cp.tau;
  j["threshold"] = threshold(a.lambda, a.mu, a.gamma);
  j["jacobian_radius"] = jacobian_radius(a.lambda, a.mu, a.gamma);
  j["predicted_opt"] = opt.value;
  j["t_star"] = opt.t_star;
  j["t_star_at_boundary"] = opt.at_boundary;
  j["null_value"] = null_value(cp);
  emit(j.dump(2) + "\n", a.out);
  return kExitOk;
}

int cmd_report(const std::string& csv_path, const std::string& out_dir) {
  const ReportFiles files = make_report(parse_sweep_csv(read_file(csv_path)));
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, text] : files) emit(text, (std::filesystem::path(out_dir) / name).string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual SBM simulation and inference lab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  ModelArgs gen_model;
  std::string gen_format = "json";
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "Sample an instance and write it to disk");
  gen_model.add(gen);
  gen->add_option("--format", gen_format, "json or bin");
  gen->add_option("--out", gen_out, "Output path")->required();

  ModelArgs run_model;
  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run one algorithm on one instance");
  run_model.add(run);
  run->add_option("--instance", run_model.instance, "Read the instance from a file");
  run->add_option("--alg", run_args.alg, "linbp, fullbp or spectral");
  run->add_option("--tmax", run_args.t_max, "Message-passing steps");
  run->add_option("--init-scale", run_args.init_scale, "Variance of the random initialization");
  run->add_option("--init-seed", run_args.init_seed, "Seed for initialization (default: instance seed)");
  run->add_flag("--trace", run_args.trace, "Include the per-step trace");
  run->add_flag("--exact-onsager", run_args.exact_onsager, "linbp: exact Onsager weights");
  run->add_option("--delta", run_args.delta, "spectral: test margin");
  run->add_option("--alg-lambda", run_args.alg_lambda, "spectral: lambda used by the estimator");
  run->add_option("--alg-mu", run_args.alg_mu, "spectral: mu used by the estimator");
  run->add_option("--out", run_args.out, "Output JSON path (default stdout)");

  std::string sweep_config_path;
  SweepConfig sweep_flags;
  std::string sweep_algs;
  auto* sweep = app.add_subcommand("sweep", "Phase-diagram sweep over (lambda, mu)");
  sweep->add_option("--config", sweep_config_path, "JSON config file");
  std::vector<std::pair<std::string, CLI::Option*>> overrides;
  overrides.emplace_back("lambda_min", sweep->add_option("--lambda-min", sweep_flags.lambda_min));
  overrides.emplace_back("lambda_max", sweep->add_option("--lambda-max", sweep_flags.lambda_max));
  overrides.emplace_back("lambda_count", sweep->add_option("--lambda-count", sweep_flags.lambda_count));
  overrides.emplace_back("mu_min", sweep->add_option("--mu-min", sweep_flags.mu_min));
  overrides.emplace_back("mu_max", sweep->add_option("--mu-max", sweep_flags.mu_max));
  overrides.emplace_back("mu_count", sweep->add_option("--mu-count", sweep_flags.mu_count));
  overrides.emplace_back("n", sweep->add_option("--n", sweep_flags.n));
  overrides.emplace_back("p", sweep->add_option("--p", sweep_flags.p));
  overrides.emplace_back("d", sweep->add_option("--d", sweep_flags.d));
  overrides.emplace_back("runs", sweep->add_option("--runs", sweep_flags.runs));
  overrides.emplace_back("t_max", sweep->add_option("--tmax", sweep_flags.run.t_max));
  overrides.emplace_back("init_scale", sweep->add_option("--init-scale", sweep_flags.run.init_scale));
  overrides.emplace_back("delta", sweep->add_option("--delta", sweep_flags.run.delta));
  overrides.emplace_back("exact_onsager", sweep->add_flag("--exact-onsager", sweep_flags.run.exact_onsager));
  overrides.emplace_back("base_seed", sweep->add_option("--seed", sweep_flags.base_seed));
  overrides.emplace_back("output_dir", sweep->add_option("--out", sweep_flags.output_dir));
  auto* algs_opt = sweep->add_option("--algorithms", sweep_algs, "Comma-separated list");

  DEArgs de_args;
  auto* de = app.add_subcommand("de", "Density evolution by population dynamics");
  de->add_option("--lambda", de_args.lambda);
  de->add_option("--mu", de_args.mu);
  de->add_option("--gamma", de_args.gamma);
  de->add_option("--d", de_args.d);
  de->add_option("--pool", de_args.pool, "Pool size");
  de->add_option("--tmax", de_args.t_max);
  de->add_option("--init-m1", de_args.init_m1, "Initial E[V eta]");
  de->add_option("--init-m2", de_args.init_m2, "Initial E[U m]");
  de->add_option("--init-var", de_args.init_var, "Initial conditional variance of eta and m");
  de->add_option("--seed", de_args.seed);
  de->add_option("--out", de_args.out, "Output CSV path (default stdout)");

  TheoryArgs th_args;
  auto* th = app.add_subcommand("theory", "Closed-form predictions");
  th->add_option("--lambda", th_args.lambda);
  th->add_option("--mu", th_args.mu);
  th->add_option("--gamma", th_args.gamma);
  th->add_option("--b", th_args.b, "Coupling (default b* sqrt(gamma))");
  th->add_option("--rho", th_args.rho);
  th->add_option("--tau", th_args.tau);
  th->add_option("--out", th_args.out);

  std::string report_csv;
  std::string report_out = "report";
  auto* rep = app.add_subcommand("report", "Heatmaps and summary from a sweep CSV");
  rep->add_option("--csv", report_csv, "sweep.csv path")->required();
  rep->add_option("--out", report_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(gen_model, gen_format, gen_out);
    if (*run) return cmd_run(run_model, run_args);
    if (*sweep) {
      SweepConfig cfg;
      if (!sweep_config_path.empty()) {
        json file;
        try {
          file = json::parse(read_file(sweep_config_path));
        } catch (const json::parse_error& e) {
          throw ConfigError(std::string("sweep config: ") + e.what());
        }
        cfg = sweep_config_from_json(file);
      }
      // Flags override the file.
      const json flag_values = to_json(sweep_flags);
      json given = json::object();
      for (const auto& [key, opt] : overrides) {
        if (opt->count() > 0) given[key] = flag_values.at(key);
      }
      if (algs_opt->count() > 0) {
        std::vector<std::string> names;
        std::stringstream ss(sweep_algs);
        for (std::string name; std::getline(ss, name, ',');) names.push_back(name);
        given["algorithms"] = names;
      }
      cfg = sweep_config_from_json(given, cfg);
      return cmd_sweep(cfg);
    }
    if (*de) return cmd_de(de_args);
    if (*th) return cmd_theory(th_args);
    if (*rep) return cmd_report(report_csv, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
