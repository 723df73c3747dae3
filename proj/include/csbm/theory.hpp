#pragma once

namespace csbm {

/// Parameters of the asymptotic comparison problem. rho and tau scale the
/// graph and covariate noise; b couples the two terms.
struct ComparisonParams {
  double rho = 1.0;
  double tau = 1.0;
  double b = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double gamma = 1.0;

  /// Throws ConfigError unless rho, tau, gamma > 0, b >= 0, lambda, mu >= 0.
  void validate() const;

  /// rho = tau = 1 and b = b* sqrt(gamma), where b* = 2 mu / (lambda gamma).
  /// With this b the null value equals 2 sqrt(1 + b*^2 gamma / 4) + b*.
  static ComparisonParams for_spectral(double lambda, double mu, double gamma);
};

/// G(kappa, sigma^2): kappa/2 + sigma^2/(2 kappa) for kappa >= sigma, sigma
/// otherwise. Throws ConfigError for kappa < 0 or sigma2 < 0.
double g_fn(double kappa, double sigma2);

/// d/dkappa G: 1/2 - sigma^2/(2 kappa^2) for kappa > sigma, 0 otherwise.
double g_prime(double kappa, double sigma2);

/// lambda^2 + mu^2/gamma > 1.
bool threshold(double lambda, double mu, double gamma);

/// The objective minimized by predicted_opt:
/// G(2 lambda + b mu t, 4 rho + b^2 tau) + G(b/t, b^2 gamma tau) / gamma.
double opt_objective(const ComparisonParams& cp, double t);

/// d/dt of opt_objective.
double opt_objective_derivative(const ComparisonParams& cp, double t);

struct OptResult {
  double value = 0.0;
  double t_star = 0.0;
  bool at_boundary = false;  // minimizer is an end of the t grid
};

inline constexpr double kTGridLo = 1e-6;
inline constexpr double kTGridHi = 1e6;

/// Minimizes opt_objective over t on a 200-point log grid in [1e-6, 1e6],
/// refined by golden-section in log t. The objective is convex in t; on flat
/// stretches the smallest minimizer is returned.
OptResult predicted_opt(const ComparisonParams& cp);

/// sqrt(4 rho + b^2 tau) + b sqrt(tau / gamma): predicted_opt at
/// lambda = mu = 0.
double null_value(const ComparisonParams& cp);

/// With b = b* sqrt(gamma) and rho = tau = 1, true iff the graph term is on
/// its supercritical branch at predicted_opt's t*, i.e. G'(2 lambda + b mu
/// t*, 4 + b^2) > 0. Requires lambda, mu > 0.
bool supercriticality_check(double lambda, double mu, double gamma);

}  // namespace csbm
