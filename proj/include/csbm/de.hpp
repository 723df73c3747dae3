#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

#include "csbm/model.hpp"

namespace csbm {

/// Parameters of the density-evolution recursion. Only lambda, mu, gamma
/// and d enter, so no (n, p) pair is needed.
struct DEParams {
  double lambda = 0.0;
  double mu = 0.0;
  double gamma = 1.0;
  double d = 1.0;

  static DEParams from(const ModelParams& p) { return {p.lambda, p.mu, p.gamma, p.d}; }
};

/// (E[V eta], E[U m], E[eta^2], E[m^2]).
struct MomentVector {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;

  Eigen::Vector4d as_vector() const { return {m1, m2, m3, m4}; }
  static MomentVector from(const Eigen::Vector4d& z) { return {z[0], z[1], z[2], z[3]}; }
  /// m1/sqrt(m3); 0 when m3 = 0.
  double normalized_correlation() const;
};

/// Particle populations: eta_plus holds samples of (eta | V = +1); the law
/// given V = -1 is its mirror image and is never stored. (m_bar[k], u[k])
/// are joint samples of (m, U).
struct DEPool {
  Eigen::VectorXd eta_plus;
  Eigen::VectorXd m_bar;
  Eigen::VectorXd u;
  DEParams params;

  std::int64_t size() const { return eta_plus.size(); }
};

/// Gaussian starting pool: eta|+ ~ N(init.m1, var_eta),
/// m = init.m2 * U + N(0, var_m), U ~ N(0, 1).
struct PoolInit {
  double m1 = 0.1;
  double m2 = 0.0;
  double var_eta = 1.0;
  double var_m = 1.0;
};

DEPool make_pool(const DEParams& params, const PoolInit& init, std::int64_t pool_size,
                 std::uint64_t seed);

/// Sample moments of the pool.
MomentVector pool_moments(const DEPool& pool);

/// Standard errors of the four sample means in pool_moments.
MomentVector pool_standard_errors(const DEPool& pool);

/// One population-dynamics step. All expectations are frozen at the values
/// of the input pool; the output has the same size. `step` selects the RNG
/// stream. Throws std::invalid_argument on an empty pool or lambda > sqrt(d).
DEPool de_step(const DEPool& pool, std::uint64_t seed, std::uint64_t step = 0);

/// Closed-form moment recursion induced by one density-evolution step.
MomentVector moment_map(const MomentVector& z, const DEParams& params);

/// Analytic Jacobian of moment_map at z.
Eigen::Matrix4d moment_map_jacobian(const MomentVector& z, const DEParams& params);

/// Spectral radius of the linearized moment map at 0: the larger root
/// magnitude of z^2 - lambda^2 z - mu^2/gamma.
double jacobian_radius(double lambda, double mu, double gamma);

struct DETrajectory {
  std::vector<MomentVector> moments;          // steps 0..t_max
  std::vector<MomentVector> standard_errors;  // same indexing
  DEPool final_pool;
};

DETrajectory de_run(DEPool pool, std::int64_t t_max, std::uint64_t seed);

}  // namespace csbm
