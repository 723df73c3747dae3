#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>

namespace csbm {

/// y = M x for a symmetric M; y is presized by the caller.
using SymmetricOperator = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;  // unit norm
  double residual = 0.0;   // ||M v - value v||
  int iterations = 0;
};

struct EigenOptions {
  double tol = 1e-8;  // relative: residual <= tol * |value|
  int max_iter = 500;
  std::uint64_t seed = 0;
  /// Optional start vector (warm start); a seeded Gaussian vector otherwise.
  const Eigen::VectorXd* start = nullptr;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Largest algebraic eigenpair by Lanczos with full reorthogonalization.
/// Convergence is confirmed on the true residual. Throws ConvergenceError
/// after max_iter Krylov steps.
EigenPair lambda_max(const SymmetricOperator& op, std::int64_t n, const EigenOptions& opts = {});

/// Power iteration on M + shift I. Slow; kept as a cross-check. The shift
/// must make the top eigenvalue dominant in magnitude.
EigenPair lambda_max_power(const SymmetricOperator& op, std::int64_t n, double shift,
                           const EigenOptions& opts = {});

}  // namespace csbm
