#include "csbm/fullbp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "csbm/linbp.hpp"

namespace csbm {

namespace {

// Squared covariate entries, computed once per run.
struct SquaredCovariates {
  explicit SquaredCovariates(const Eigen::MatrixXd& b)
      : entries(b.array().square().matrix()), row_sums(entries.rowwise().sum()) {}
  Eigen::MatrixXd entries;
  Eigen::VectorXd row_sums;
};

MessageState step_impl(const Instance& inst, const SquaredCovariates& bsq,
                       const MessageState& state, const BPConfig& cfg) {
  state.check_against(inst);
  const auto& prm = inst.params;
  const auto& b = inst.covariates;
  const auto& graph = inst.graph;
  const double mu_over_gamma = prm.mu / prm.gamma;
  const double cov_gain = std::sqrt(mu_over_gamma);
  if (state.tau.size() > 0 && !(state.tau.minCoeff() > 0.0)) {
    throw NumericalError("fullbp_step: tau must be positive");
  }

  const Eigen::ArrayXd tanh_eta = state.eta.array().tanh();
  const Eigen::VectorXd sech2_eta = (1.0 - tanh_eta.square()).matrix();

  MessageState next;
  next.step = state.step + 1;
  next.eta_prev = state.eta;
  next.eta_edge_prev = state.eta_edge;
  next.m_prev = state.m;

  // tau^{t+1} comes first: the m-update divides by it.
  const Eigen::VectorXd weighted_rows = bsq.entries * sech2_eta;
  const Eigen::ArrayXd denom = 1.0 + prm.mu - mu_over_gamma * weighted_rows.array();
  for (Eigen::Index q = 0; q < denom.size(); ++q) {
    if (!(denom[q] > 0.0)) {
      throw NumericalError("fullbp_step: tau denominator " + std::to_string(denom[q]) +
                           " <= 0 at covariate " + std::to_string(q));
    }
  }
  next.tau = denom.inverse().matrix();

  Eigen::VectorXd field = cov_gain * (b.transpose() * state.m);
  const Eigen::VectorXd memory_weight = bsq.entries.transpose() * state.tau.cwiseInverse();
  field.array() -= mu_over_gamma * memory_weight.array() * state.eta_prev.array().tanh();
  double mean_field = 0.0;
  for (Eigen::Index k = 0; k < state.eta.size(); ++k) mean_field += f_rho(state.eta[k], cfg.rho_n);
  field.array() -= mean_field;

  next.eta.resize(prm.n);
  next.eta_edge.resize(graph.num_directed());
  Eigen::VectorXd incoming_f(graph.num_directed());
  for (std::int64_t i = 0; i < prm.n; ++i) {
    double incoming = 0.0;
    for (std::int64_t s = graph.begin(i); s < graph.end(i); ++s) {
      incoming_f[s] = f_rho(state.eta_edge[graph.reverse(s)], cfg.rho);
      incoming += incoming_f[s];
    }
    if (std::abs(incoming) > cfg.rho * static_cast<double>(graph.degree(i)) * (1.0 + 1e-12)) {
      throw NumericalError("fullbp_step: edge field exceeds rho * degree");
    }
    const double vertex = field[i] + incoming;
    next.eta[i] = vertex;
    for (std::int64_t s = graph.begin(i); s < graph.end(i); ++s) {
      next.eta_edge[s] = vertex - incoming_f[s];
    }
  }

  next.m = (cov_gain * (b * tanh_eta.matrix()).array() -
            mu_over_gamma * weighted_rows.array() * state.m_prev.array()) /
           next.tau.array();
  return next;
}

}  // namespace

BPConfig make_bp_config(const ModelParams& params, std::int64_t t_max, double init_scale) {
  if (t_max < 0) throw ConfigError("t_max must be >= 0");
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be >= 0");
  const double ratio = params.lambda / std::sqrt(params.d);
  if (!(ratio < 1.0)) throw ConfigError("fullbp requires lambda < sqrt(d)");
  const double ratio_n = params.lambda * std::sqrt(params.d) / (static_cast<double>(params.n) - params.d);
  if (!(ratio_n >= 0.0 && ratio_n < 1.0)) throw ConfigError("fullbp requires lambda sqrt(d) < n - d");
  BPConfig cfg;
  cfg.rho = std::atanh(ratio);
  cfg.rho_n = std::atanh(ratio_n);
  cfg.t_max = t_max;
  cfg.init_scale = init_scale;
  return cfg;
}

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// 1/2 log(cosh(z + rho) / cosh(z - rho)) = atanh(tanh z tanh rho). The
// log-cosh difference cancels catastrophically once |z| >> rho; this form
// does not. The clamp absorbs the last-ulp excess of atanh(tanh(rho)).
double f_rho(double z, double rho) {
  const double f = std::atanh(std::tanh(z) * std::tanh(rho));
  return std::copysign(std::min(std::abs(f), rho), f);
}

MessageState fullbp_step(const Instance& inst, const MessageState& state, const BPConfig& cfg) {
  return step_impl(inst, SquaredCovariates(inst.covariates), state, cfg);
}

FullBPResult fullbp_run_from(const Instance& inst, const BPConfig& cfg, MessageState init) {
  init.check_against(inst);
  const SquaredCovariates bsq(inst.covariates);
  const auto& prm = inst.params;
  // Upper bound on tau: sech^2 <= 1, so the denominator is at least
  // 1 + mu - mu * s_max.
  const double s_max = bsq.row_sums.size() > 0 ? bsq.row_sums.maxCoeff() / prm.gamma : 0.0;
  const double tau_floor_denom = 1.0 + prm.mu - prm.mu * s_max;

  FullBPResult result;
  result.initial = init;
  result.trace.push_back(summarize(inst, init));
  MessageState state = std::move(init);
  for (std::int64_t t = 0; t < cfg.t_max; ++t) {
    state = step_impl(inst, bsq, state, cfg);
    if (tau_floor_denom > 0.0 && state.tau.maxCoeff() > (1.0 / tau_floor_denom) * (1.0 + 1e-12)) {
      throw NumericalError("fullbp: tau exceeds its a priori bound");
    }
    result.trace.push_back(summarize(inst, state));
    result.saturated = result.saturated || result.trace.back().saturated;
  }
  result.v_hat = estimate_labels(state.eta);
  const double m_norm = state.m.norm();
  result.u_hat = m_norm > 0.0 ? Eigen::VectorXd(state.m / m_norm)
                              : Eigen::VectorXd(Eigen::VectorXd::Zero(state.m.size()));
  result.decision = null_test(result.initial.eta.norm(), state.eta.norm());
  result.final_state = std::move(state);
  return result;
}

FullBPResult fullbp_run(const Instance& inst, const BPConfig& cfg, std::uint64_t seed) {
  return fullbp_run_from(inst, cfg, random_state(inst, cfg.init_scale, seed, true));
}

}  // namespace csbm
