#include "csbm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace csbm {

namespace {

void fix_sign_and_scale(Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
  v *= std::sqrt(static_cast<double>(v.size())) / v.norm();
}

EigenOptions eig_options(const SpectralOptions& opts, const Eigen::VectorXd* start) {
  EigenOptions eo;
  eo.tol = opts.eig_tol;
  eo.max_iter = opts.max_iter;
  eo.seed = opts.seed;
  eo.start = start;
  return eo;
}

}  // namespace

double b_star(double lambda, double mu, double gamma) {
  if (!(lambda > 0.0)) throw ConfigError("b_star requires lambda > 0");
  if (!(gamma > 0.0)) throw ConfigError("b_star requires gamma > 0");
  return 2.0 * mu / (lambda * gamma);
}

double coupling_coefficient(double lambda, double mu, double gamma, double xi) {
  if (!(xi > 0.0)) throw ConfigError("M(xi) requires xi > 0");
  return 2.0 * mu * mu / (lambda * lambda * gamma * gamma * xi);
}

SpectralProblem make_problem(const GaussianInstance& inst) {
  SpectralProblem prob;
  prob.n = inst.params.n;
  prob.covariates = &inst.covariates;
  const Eigen::MatrixXd* a = &inst.matrix_a;
  prob.apply_a = [a](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = (*a) * x; };
  return prob;
}

SpectralProblem make_problem(const Instance& inst) {
  SpectralProblem prob;
  prob.n = inst.params.n;
  prob.covariates = &inst.covariates;
  const Graph* g = &inst.graph;
  const double d = inst.params.d;
  const double scale = 1.0 / std::sqrt(d);
  const double mean_weight = d / static_cast<double>(inst.params.n);
  prob.apply_a = [g, scale, mean_weight](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const double shift = mean_weight * x.sum();
    for (std::int64_t i = 0; i < g->num_nodes(); ++i) {
      double acc = 0.0;
      for (std::int64_t s = g->begin(i); s < g->end(i); ++s) acc += x[g->target(s)];
      y[i] = scale * (acc - shift);
    }
  };
  return prob;
}

void apply_M(const SpectralProblem& prob, double lambda, double mu, double gamma, double xi,
             const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const double c = coupling_coefficient(lambda, mu, gamma, xi);
  y.resize(prob.n);
  prob.apply_a(x, y);
  if (c != 0.0) {
    const Eigen::VectorXd bx = (*prob.covariates) * x;
    y.noalias() += c * (prob.covariates->transpose() * bx);
  }
  y += (0.5 * xi) * x;
}

Eigen::VectorXd apply_M(const GaussianInstance& inst, double lambda, double mu, double gamma,
                        double xi, const Eigen::VectorXd& x) {
  Eigen::VectorXd y;
  apply_M(make_problem(inst), lambda, mu, gamma, xi, x, y);
  return y;
}

SpectralResult minimize_xi(const SpectralProblem& prob, double lambda, double mu, double gamma,
                           const SpectralOptions& opts) {
  if (lambda < 0.0 || mu < 0.0) throw ConfigError("minimize_xi: lambda, mu must be >= 0");
  if (!(gamma > 0.0)) throw ConfigError("minimize_xi: gamma must be positive");
  if (!(opts.tol_xi > 0.0)) throw ConfigError("minimize_xi: tol_xi must be positive");
  if (!(0.0 < opts.bracket_lo && opts.bracket_lo < opts.bracket_hi)) {
    throw ConfigError("minimize_xi: invalid initial bracket");
  }
  SpectralResult out;

  if (lambda == 0.0 && mu == 0.0) throw ConfigError("minimize_xi: lambda and mu are both zero");
  if (mu == 0.0 || lambda == 0.0) {
    // Degenerate couplings: only one data source enters M.
    const bool graph_only = mu == 0.0;
    const auto& b = *prob.covariates;
    SymmetricOperator op = graph_only
                               ? prob.apply_a
                               : SymmetricOperator([&b](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
                                   y.noalias() = b.transpose() * (b * x);
                                 });
    const EigenPair top = lambda_max(op, prob.n, eig_options(opts, nullptr));
    out.path = graph_only ? SpectralPath::kGraphOnly : SpectralPath::kCovariateOnly;
    out.t_value = top.value;
    out.eig_iters = top.iterations;
    out.v_hat = top.vector;
    fix_sign_and_scale(out.v_hat);
    return out;
  }

  Eigen::VectorXd warm;
  double best_value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_vec;
  double tol = std::max(opts.probe_tol, opts.eig_tol);
  auto g = [&](double xi) {
    const SymmetricOperator op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
      apply_M(prob, lambda, mu, gamma, xi, x, y);
    };
    EigenOptions eo = eig_options(opts, warm.size() ? &warm : nullptr);
    eo.tol = tol;
    const EigenPair top = lambda_max(op, prob.n, eo);
    warm = top.vector;
    out.eig_iters += top.iterations;
    if (top.value < best_value) {
      best_value = top.value;
      best_vec = top.vector;
    }
    return top.value;
  };

  // Expand [lo, hi] geometrically until the geometric midpoint beats both ends.
  constexpr int kMaxExpansions = 40;
  constexpr double kFactor = 10.0;
  double lo = opts.bracket_lo;
  double hi = opts.bracket_hi;
  double mid = std::sqrt(lo * hi);
  double g_lo = g(lo);
  double g_mid = g(mid);
  double g_hi = g(hi);
  out.probes = {{lo, g_lo}, {mid, g_mid}, {hi, g_hi}};
  int expansions = 0;
  while (!(g_mid < g_lo && g_mid < g_hi)) {
    if (++expansions > kMaxExpansions) {
      throw std::runtime_error("minimize_xi: bracket expansion failed (is B^T B = 0?)");
    }
    if (g_lo <= g_mid) {
      hi = mid;
      g_hi = g_mid;
      mid = lo;
      g_mid = g_lo;
      lo = lo / kFactor;
      g_lo = g(lo);
      out.probes.push_back({lo, g_lo});
    } else {
      lo = mid;
      g_lo = g_mid;
      mid = hi;
      g_mid = g_hi;
      hi = hi * kFactor;
      g_hi = g(hi);
      out.probes.push_back({hi, g_hi});
    }
  }

  const GoldenResult gold = golden_section(g, lo, hi, opts.tol_xi);
  out.probes.insert(out.probes.end(), gold.probes.begin(), gold.probes.end());
  out.bracket_lo = gold.lo;
  out.bracket_hi = gold.hi;
  out.xi_star = gold.x_min;
  out.t_value = gold.value;
  // Re-solve at xi* from the best probe's vector so v_hat belongs to xi*.
  warm = best_vec;
  tol = opts.eig_tol;
  out.t_value = g(out.xi_star);
  out.v_hat = warm;
  fix_sign_and_scale(out.v_hat);
  return out;
}

SpectralResult minimize_xi(const GaussianInstance& inst, double lambda, double mu, double gamma,
                           const SpectralOptions& opts) {
  return minimize_xi(make_problem(inst), lambda, mu, gamma, opts);
}

double convexity_violation(std::vector<GoldenProbe> probes) {
  std::sort(probes.begin(), probes.end(),
            [](const GoldenProbe& a, const GoldenProbe& b) { return a.x < b.x; });
  double worst = -std::numeric_limits<double>::infinity();
  const auto k = probes.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      for (std::size_t l = j + 1; l < k; ++l) {
        const auto &a = probes[i], &b = probes[j], &c = probes[l];
        if (!(a.x < b.x && b.x < c.x)) continue;
        const double w = (b.x - a.x) / (c.x - a.x);
        const double chord = (1.0 - w) * a.value + w * c.value;
        worst = std::max(worst, b.value - chord);
      }
    }
  }
  return worst;
}

double spectral_null_value(double lambda, double mu, double gamma) {
  const double b = b_star(lambda, mu, gamma);
  return 2.0 * std::sqrt(1.0 + b * b * gamma / 4.0) + b;
}

Decision gaussian_test(double t_value, double lambda, double mu, double gamma, double delta) {
  if (!(delta >= 0.0)) throw ConfigError("gaussian_test: delta must be >= 0");
  return t_value > spectral_null_value(lambda, mu, gamma) + delta ? Decision::kReject
                                                                  : Decision::kAccept;
}

}  // namespace csbm
