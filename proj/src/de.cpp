#include "csbm/de.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "csbm/rng.hpp"

namespace csbm {

double MomentVector::normalized_correlation() const { return m3 > 0.0 ? m1 / std::sqrt(m3) : 0.0; }

DEPool make_pool(const DEParams& params, const PoolInit& init, std::int64_t pool_size,
                 std::uint64_t seed) {
  if (pool_size < 1) throw std::invalid_argument("pool size must be positive");
  if (init.var_eta < 0.0 || init.var_m < 0.0) throw std::invalid_argument("negative pool variance");
  DEPool pool;
  pool.params = params;
  pool.eta_plus.resize(pool_size);
  pool.m_bar.resize(pool_size);
  pool.u.resize(pool_size);
  Rng rng(seed, stream::kPoolInit);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd_eta = std::sqrt(init.var_eta);
  const double sd_m = std::sqrt(init.var_m);
  for (std::int64_t k = 0; k < pool_size; ++k) {
    pool.eta_plus[k] = init.m1 + sd_eta * normal(rng);
    pool.u[k] = normal(rng);
    pool.m_bar[k] = init.m2 * pool.u[k] + sd_m * normal(rng);
  }
  return pool;
}

MomentVector pool_moments(const DEPool& pool) {
  if (pool.size() == 0) throw std::invalid_argument("empty pool");
  // Under the symmetry E[V eta] = E[eta | V = +1].
  MomentVector z;
  z.m1 = pool.eta_plus.mean();
  z.m2 = pool.u.cwiseProduct(pool.m_bar).mean();
  z.m3 = pool.eta_plus.squaredNorm() / static_cast<double>(pool.size());
  z.m4 = pool.m_bar.squaredNorm() / static_cast<double>(pool.size());
  return z;
}

MomentVector pool_standard_errors(const DEPool& pool) {
  if (pool.size() < 2) throw std::invalid_argument("pool too small for standard errors");
  auto se = [n = static_cast<double>(pool.size())](const Eigen::ArrayXd& x) {
    const double mean = x.mean();
    return std::sqrt((x - mean).square().sum() / (n - 1.0) / n);
  };
  MomentVector s;
  s.m1 = se(pool.eta_plus.array());
  s.m2 = se(pool.u.array() * pool.m_bar.array());
  s.m3 = se(pool.eta_plus.array().square());
  s.m4 = se(pool.m_bar.array().square());
  return s;
}

DEPool de_step(const DEPool& pool, std::uint64_t seed, std::uint64_t step) {
  if (pool.size() == 0) throw std::invalid_argument("de_step: empty pool");
  const auto& prm = pool.params;
  const double sqrt_d = std::sqrt(prm.d);
  const double rate_plus = 0.5 * (prm.d + prm.lambda * sqrt_d);
  const double rate_minus = 0.5 * (prm.d - prm.lambda * sqrt_d);
  if (rate_minus < -1e-12) throw std::invalid_argument("de_step: lambda > sqrt(d)");

  const MomentVector z = pool_moments(pool);
  // Unconditional E[eta] over the symmetrized law: half the mass is the
  // mirror image of eta_plus.
  const double eta_mean = 0.5 * z.m1 + 0.5 * (-z.m1);

  const auto size = pool.size();
  DEPool next;
  next.params = prm;
  next.eta_plus.resize(size);
  next.m_bar.resize(size);
  next.u.resize(size);

  Rng rng(seed, stream::kPoolStep + step);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> pick(0, size - 1);
  std::poisson_distribution<int> count_plus(std::max(rate_plus, 0.0));
  std::poisson_distribution<int> count_minus(std::max(rate_minus, 0.0));

  const double m_signal = prm.mu * z.m1;
  const double m_noise = std::sqrt(std::max(prm.mu * z.m3, 0.0));
  const double eta_shift = -prm.lambda * sqrt_d * eta_mean + (prm.mu / prm.gamma) * z.m2;
  const double eta_noise = std::sqrt(std::max((prm.mu / prm.gamma) * z.m4, 0.0));
  const double edge_gain = prm.lambda / sqrt_d;

  for (std::int64_t k = 0; k < size; ++k) {
    const double u_new = normal(rng);
    next.u[k] = u_new;
    next.m_bar[k] = m_signal * u_new + m_noise * normal(rng);

    const int k_plus = rate_plus > 0.0 ? count_plus(rng) : 0;
    const int k_minus = rate_minus > 0.0 ? count_minus(rng) : 0;
    double sum = 0.0;
    for (int j = 0; j < k_plus; ++j) sum += pool.eta_plus[pick(rng)];
    for (int j = 0; j < k_minus; ++j) sum -= pool.eta_plus[pick(rng)];
    next.eta_plus[k] = edge_gain * sum + eta_shift + eta_noise * normal(rng);
  }
  return next;
}

MomentVector moment_map(const MomentVector& z, const DEParams& prm) {
  const double l2 = prm.lambda * prm.lambda;
  const double mg = prm.mu / prm.gamma;
  MomentVector out;
  out.m1 = l2 * z.m1 + mg * z.m2;
  out.m2 = prm.mu * z.m1;
  // Second moment of eta': compound-Poisson variance lambda^2 m3, Gaussian
  // variance (mu/gamma) m4, plus the squared conditional mean out.m1.
  out.m3 = l2 * z.m3 + mg * z.m4 + out.m1 * out.m1;
  out.m4 = prm.mu * prm.mu * z.m1 * z.m1 + prm.mu * z.m3;
  return out;
}

Eigen::Matrix4d moment_map_jacobian(const MomentVector& z, const DEParams& prm) {
  const double l2 = prm.lambda * prm.lambda;
  const double mg = prm.mu / prm.gamma;
  const double phi1 = l2 * z.m1 + mg * z.m2;
  Eigen::Matrix4d j;
  // clang-format off
  j << l2,                          mg,              0.0, 0.0,
       prm.mu,                      0.0,             0.0, 0.0,
       2.0 * phi1 * l2,             2.0 * phi1 * mg, l2,  mg,
       2.0 * prm.mu * prm.mu * z.m1, 0.0,            prm.mu, 0.0;
  // clang-format on
  return j;
}

double jacobian_radius(double lambda, double mu, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("jacobian_radius: gamma must be positive");
  const double l2 = lambda * lambda;
  const double c = mu * mu / gamma;
  // Roots are real (discriminant l2^2 + 4c >= 0) and the + root dominates.
  return 0.5 * (l2 + std::sqrt(l2 * l2 + 4.0 * c));
}

DETrajectory de_run(DEPool pool, std::int64_t t_max, std::uint64_t seed) {
  if (t_max < 0) throw std::invalid_argument("de_run: t_max must be >= 0");
  DETrajectory traj;
  traj.moments.push_back(pool_moments(pool));
  traj.standard_errors.push_back(pool_standard_errors(pool));
  for (std::int64_t t = 0; t < t_max; ++t) {
    pool = de_step(pool, seed, static_cast<std::uint64_t>(t));
    traj.moments.push_back(pool_moments(pool));
    traj.standard_errors.push_back(pool_standard_errors(pool));
  }
  traj.final_pool = std::move(pool);
  return traj;
}

}  // namespace csbm
