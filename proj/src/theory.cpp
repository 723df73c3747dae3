#include "csbm/theory.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "csbm/golden.hpp"
#include "csbm/model.hpp"

namespace csbm {

void ComparisonParams::validate() const {
  if (!(rho > 0.0) || !(tau > 0.0)) throw ConfigError("rho and tau must be positive");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(b >= 0.0)) throw ConfigError("b must be >= 0");
  if (!(lambda >= 0.0) || !(mu >= 0.0)) throw ConfigError("lambda and mu must be >= 0");
}

ComparisonParams ComparisonParams::for_spectral(double lambda, double mu, double gamma) {
  if (!(lambda > 0.0)) throw ConfigError("b* requires lambda > 0");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  ComparisonParams cp;
  cp.lambda = lambda;
  cp.mu = mu;
  cp.gamma = gamma;
  cp.b = 2.0 * mu / (lambda * gamma) * std::sqrt(gamma);
  return cp;
}

double g_fn(double kappa, double sigma2) {
  if (!(kappa >= 0.0)) throw ConfigError("g_fn: kappa must be >= 0");
  if (!(sigma2 >= 0.0)) throw ConfigError("g_fn: sigma2 must be >= 0");
  const double sigma = std::sqrt(sigma2);
  if (kappa <= sigma) return sigma;
  return 0.5 * kappa + sigma2 / (2.0 * kappa);
}

double g_prime(double kappa, double sigma2) {
  if (!(kappa >= 0.0)) throw ConfigError("g_prime: kappa must be >= 0");
  if (!(sigma2 >= 0.0)) throw ConfigError("g_prime: sigma2 must be >= 0");
  if (kappa <= std::sqrt(sigma2)) return 0.0;
  return 0.5 - sigma2 / (2.0 * kappa * kappa);
}

bool threshold(double lambda, double mu, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("threshold: gamma must be positive");
  return lambda * lambda + mu * mu / gamma > 1.0;
}

double opt_objective(const ComparisonParams& cp, double t) {
  const double graph = g_fn(2.0 * cp.lambda + cp.b * cp.mu * t, 4.0 * cp.rho + cp.b * cp.b * cp.tau);
  const double cov = g_fn(cp.b / t, cp.b * cp.b * cp.gamma * cp.tau);
  return graph + cov / cp.gamma;
}

double opt_objective_derivative(const ComparisonParams& cp, double t) {
  const double graph =
      cp.b * cp.mu * g_prime(2.0 * cp.lambda + cp.b * cp.mu * t, 4.0 * cp.rho + cp.b * cp.b * cp.tau);
  const double cov = cp.b / (t * t) * g_prime(cp.b / t, cp.b * cp.b * cp.gamma * cp.tau);
  return graph - cov / cp.gamma;
}

OptResult predicted_opt(const ComparisonParams& cp) {
  cp.validate();
  constexpr int kGrid = 200;
  const double log_lo = std::log(kTGridLo);
  const double log_hi = std::log(kTGridHi);
  const double step = (log_hi - log_lo) / (kGrid - 1);
  auto h = [&](double log_t) { return opt_objective(cp, std::exp(log_t)); };

  int best = 0;
  double best_value = h(log_lo);
  for (int k = 1; k < kGrid; ++k) {
    const double value = h(log_lo + k * step);
    if (value < best_value) {
      best = k;
      best_value = value;
    }
  }
  OptResult out;
  const double lo = log_lo + std::max(best - 1, 0) * step;
  const double hi = log_lo + std::min(best + 1, kGrid - 1) * step;
  // Ties move the bracket left, so flat minima resolve to their left end.
  const GoldenResult gold = golden_section(h, lo, hi, 1e-12);
  out.t_star = std::exp(gold.x_min);
  out.value = gold.value;
  if (best_value < out.value) {
    out.t_star = std::exp(log_lo + best * step);
    out.value = best_value;
  }
  out.at_boundary = best == 0 || best == kGrid - 1;
  return out;
}

double null_value(const ComparisonParams& cp) {
  cp.validate();
  return std::sqrt(4.0 * cp.rho + cp.b * cp.b * cp.tau) + cp.b * std::sqrt(cp.tau / cp.gamma);
}

bool supercriticality_check(double lambda, double mu, double gamma) {
  if (!(lambda > 0.0) || !(mu > 0.0)) throw ConfigError("supercriticality_check: lambda, mu must be > 0");
  const ComparisonParams cp = ComparisonParams::for_spectral(lambda, mu, gamma);
  const OptResult opt = predicted_opt(cp);
  return g_prime(2.0 * lambda + cp.b * mu * opt.t_star, 4.0 + cp.b * cp.b) > 0.0;
}

}  // namespace csbm
