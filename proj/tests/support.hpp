#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "csbm/de.hpp"
#include "csbm/messages.hpp"
#include "csbm/model.hpp"
#include "csbm/rng.hpp"

namespace csbm::testing {

/// Instance from explicit pieces; params are derived from (n, p, d, lambda, mu).
inline Instance hand_instance(std::int64_t n, std::int64_t p, double d, double lambda, double mu,
                              std::vector<std::pair<std::int32_t, std::int32_t>> edges,
                              Eigen::MatrixXd covariates, std::vector<int> v, Eigen::VectorXd u) {
  Instance inst;
  inst.params = derive_params(n, p, d, lambda, mu);
  inst.graph = Graph(n, std::move(edges));
  inst.covariates = std::move(covariates);
  inst.truth.v = std::move(v);
  inst.truth.u = std::move(u);
  return inst;
}

/// Random message state with every vector (including t-1 copies) drawn
/// N(0, scale^2); tau drawn in [0.5, 1.5].
inline MessageState random_messages(const Instance& inst, double scale, std::uint64_t seed) {
  Rng rng(seed, 999);
  std::normal_distribution<double> normal(0.0, scale);
  auto fill = [&](Eigen::Index size) {
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v[i] = normal(rng);
    return v;
  };
  MessageState s;
  s.eta = fill(inst.params.n);
  s.eta_prev = fill(inst.params.n);
  s.eta_edge = fill(inst.graph.num_directed());
  s.eta_edge_prev = fill(inst.graph.num_directed());
  s.m = fill(inst.params.p);
  s.m_prev = fill(inst.params.p);
  s.tau.resize(inst.params.p);
  for (Eigen::Index q = 0; q < s.tau.size(); ++q) s.tau[q] = 0.5 + rng.uniform();
  return s;
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index size, std::uint64_t seed, std::uint64_t stream = 777) {
  Rng rng(seed, stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

/// max over unit x of <x, A x> + b ||B x|| by shifted projected ascent from
/// `restarts` random starts. The shift makes the objective convex, so each
/// normalized-gradient step is monotone. Returns the best value found.
inline double projected_ascent(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_mat, double b,
                               int restarts, std::uint64_t seed, int max_iter = 20000) {
  const Eigen::Index n = a.rows();
  const double shift = std::max(0.0, -Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues()[0]);
  const Eigen::MatrixXd gram = b_mat.transpose() * b_mat;
  auto value = [&](const Eigen::VectorXd& x) { return x.dot(a * x) + b * (b_mat * x).norm(); };
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd x = gaussian_vector(n, seed, stream::kAscent + static_cast<std::uint64_t>(r));
    x.normalize();
    double current = value(x);
    for (int it = 0; it < max_iter; ++it) {
      const double bx = (b_mat * x).norm();
      Eigen::VectorXd g = 2.0 * (a * x + shift * x);
      if (bx > 0.0) g += b * (gram * x) / bx;
      x = g.normalized();
      const double next = value(x);
      if (next - current < 1e-14 * std::max(1.0, std::abs(next))) {
        current = std::max(current, next);
        break;
      }
      current = next;
    }
    best = std::max(best, current);
  }
  return best;
}

/// Covariance of the four sample means in pool_moments.
inline Eigen::Matrix4d pool_covariance(const DEPool& pool) {
  const Eigen::Index n = pool.size();
  Eigen::MatrixXd x(n, 4);
  x.col(0) = pool.eta_plus;
  x.col(1) = pool.u.cwiseProduct(pool.m_bar);
  x.col(2) = pool.eta_plus.cwiseAbs2();
  x.col(3) = pool.m_bar.cwiseAbs2();
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  return (centered.transpose() * centered) / (static_cast<double>(n - 1) * static_cast<double>(n));
}

/// Runs population dynamics from `pool` and iterates moment_map from the
/// step-0 pool moments. Returns, over steps 1..steps and all four moments,
/// the largest gap divided by its standard error. The error of step t is the
/// fresh sampling covariance of pool t plus step t-1's error pushed through
/// the Jacobian of the map.
inline double de_tracking_ratio(const DEPool& start, std::int64_t steps, std::uint64_t seed) {
  const DEParams& prm = start.params;
  DEPool pool = start;
  MomentVector phi = pool_moments(pool);
  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  double worst = 0.0;
  for (std::int64_t t = 0; t < steps; ++t) {
    const Eigen::Matrix4d j = moment_map_jacobian(phi, prm);
    phi = moment_map(phi, prm);
    pool = de_step(pool, seed, static_cast<std::uint64_t>(t));
    cov = pool_covariance(pool) + j * cov * j.transpose();
    const Eigen::Vector4d gap = (pool_moments(pool).as_vector() - phi.as_vector()).cwiseAbs();
    for (int k = 0; k < 4; ++k) {
      const double se = std::sqrt(cov(k, k));
      if (se > 0.0) worst = std::max(worst, gap[k] / se);
      else if (gap[k] > 0.0) worst = std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

}  // namespace csbm::testing
