#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "csbm/eigen_solver.hpp"
#include "csbm/golden.hpp"
#include "csbm/metrics.hpp"
#include "csbm/model.hpp"

namespace csbm {

/// 2 mu / (lambda gamma). Throws ConfigError unless lambda > 0 and gamma > 0.
double b_star(double lambda, double mu, double gamma);

/// Coefficient of B^T B in M(xi): 2 mu^2 / (lambda^2 gamma^2 xi).
double coupling_coefficient(double lambda, double mu, double gamma, double xi);

/// The data the estimator sees: a symmetric n x n operator A and the p x n
/// covariate matrix B (column i is b_i). Both must outlive the problem.
struct SpectralProblem {
  SymmetricOperator apply_a;
  const Eigen::MatrixXd* covariates = nullptr;
  std::int64_t n = 0;
};

SpectralProblem make_problem(const GaussianInstance& inst);

/// Sparse-graph extrapolation: A = (A^G - (d/n) 11^T) / sqrt(d), applied
/// without densifying.
SpectralProblem make_problem(const Instance& inst);

/// y = A x + c B^T (B x) + (xi/2) x. Throws ConfigError for xi <= 0.
void apply_M(const SpectralProblem& prob, double lambda, double mu, double gamma, double xi,
             const Eigen::VectorXd& x, Eigen::VectorXd& y);

Eigen::VectorXd apply_M(const GaussianInstance& inst, double lambda, double mu, double gamma,
                        double xi, const Eigen::VectorXd& x);

enum class SpectralPath {
  kXiSearch,     // golden-section over xi
  kGraphOnly,    // mu = 0: top eigenvector of A
  kCovariateOnly // lambda = 0: top right-singular vector of B
};

struct SpectralOptions {
  double tol_xi = 1e-6;
  double eig_tol = 1e-8;  // final solve at xi*
  /// Residual tolerance while searching. The eigenvalue error is quadratic
  /// in the residual, so probes stay accurate well below tol_xi effects.
  double probe_tol = 1e-6;
  int max_iter = 500;
  std::uint64_t seed = 0;
  double bracket_lo = 1e-3;
  double bracket_hi = 10.0;
};

struct SpectralResult {
  double xi_star = 0.0;
  double t_value = 0.0;  // min over xi of lambda_max(M(xi))
  Eigen::VectorXd v_hat;  // norm sqrt(n), first nonzero coordinate positive
  std::int64_t eig_iters = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::vector<GoldenProbe> probes;  // every lambda_max evaluation, incl. expansion
  SpectralPath path = SpectralPath::kXiSearch;
};

/// Golden-section minimization of xi -> lambda_max(M(xi)) over an
/// auto-expanded bracket. Degenerate mu = 0 or lambda = 0 take the direct
/// eigenvector paths. Throws std::runtime_error if bracket expansion fails.
SpectralResult minimize_xi(const SpectralProblem& prob, double lambda, double mu, double gamma,
                           const SpectralOptions& opts = {});

SpectralResult minimize_xi(const GaussianInstance& inst, double lambda, double mu, double gamma,
                           const SpectralOptions& opts = {});

/// Largest violation of convexity over all ordered probe triples; <= 0 when
/// the probes are consistent with a convex function.
double convexity_violation(std::vector<GoldenProbe> probes);

/// 2 sqrt(1 + b*^2 gamma / 4) + b*, the large-n value of the statistic under
/// the null.
double spectral_null_value(double lambda, double mu, double gamma);

/// Reject iff t_value > spectral_null_value + delta. Throws ConfigError for
/// delta < 0.
Decision gaussian_test(double t_value, double lambda, double mu, double gamma, double delta);

}  // namespace csbm
