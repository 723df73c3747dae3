#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "csbm/messages.hpp"
#include "csbm/metrics.hpp"
#include "csbm/model.hpp"

namespace csbm {

/// Raised when the covariate variance recursion produces tau <= 0.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BPConfig {
  double rho = 0.0;    // atanh(lambda / sqrt(d))
  double rho_n = 0.0;  // atanh(lambda sqrt(d) / (n - d))
  std::int64_t t_max = 50;
  double init_scale = 0.01;
};

/// Computes rho and rho_n from the model. Throws ConfigError unless
/// lambda < sqrt(d) and lambda sqrt(d) < n - d.
BPConfig make_bp_config(const ModelParams& params, std::int64_t t_max = 50,
                        double init_scale = 0.01);

/// log cosh(x), stable for any finite x.
double log_cosh(double x);

/// f(z; rho) = 1/2 log(cosh(z + rho) / cosh(z - rho)).
double f_rho(double z, double rho);

/// One step of the nonlinear AMP/BP. Returns the t+1 state (tau holds
/// tau^{t+1}); the input is untouched. Throws NumericalError if a tau
/// denominator is not positive, std::invalid_argument on index mismatch.
MessageState fullbp_step(const Instance& inst, const MessageState& state, const BPConfig& cfg);

struct FullBPResult {
  MessageState initial;
  MessageState final_state;
  std::vector<StepSummary> trace;
  std::vector<int> v_hat;
  Eigen::VectorXd u_hat;  // m^T / ||m^T||; zero vector when m^T = 0
  Decision decision = Decision::kAccept;
  bool saturated = false;
};

/// Random start with eta^0, eta^-1, m^0, m^-1 (and edge messages) i.i.d.
/// N(0, init_scale), tau^0 = 1, then cfg.t_max steps.
FullBPResult fullbp_run(const Instance& inst, const BPConfig& cfg, std::uint64_t seed);

FullBPResult fullbp_run_from(const Instance& inst, const BPConfig& cfg, MessageState init);

}  // namespace csbm
