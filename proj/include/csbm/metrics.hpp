#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace csbm {

/// |<v_hat, v>| / n, with v_hat first rescaled to norm sqrt(n). Sign vectors
/// already have that norm, so they pass through unchanged.
/// Throws std::invalid_argument on size mismatch or a zero v_hat.
double overlap(const Eigen::VectorXd& v_hat, std::span<const int> v);
double overlap(std::span<const int> v_hat, std::span<const int> v);

/// |cos angle(u_hat, u)|. Throws on zero vectors or size mismatch.
double covariate_overlap(const Eigen::VectorXd& u_hat, const Eigen::VectorXd& u);

enum class Decision { kAccept, kReject };

inline const char* to_string(Decision d) { return d == Decision::kReject ? "reject" : "accept"; }

/// Outcome of one algorithm run on one instance.
struct RunSummary {
  std::string algorithm;
  double lambda = 0.0;
  double mu = 0.0;
  std::uint64_t seed = 0;
  double overlap = 0.0;
  double cov_overlap = 0.0;
  Decision decision = Decision::kAccept;
  double wall_time = 0.0;  // seconds
  bool failed = false;
  std::string error;
};

}  // namespace csbm
