#include "csbm/linbp.hpp"

#include <cmath>
#include <stdexcept>

namespace csbm {

MessageState linbp_step(const Instance& inst, const MessageState& state, const LinBPOptions& opts) {
  state.check_against(inst);
  const auto& prm = inst.params;
  const auto& b = inst.covariates;
  const auto& graph = inst.graph;
  const double nd = static_cast<double>(prm.n);
  const double cov_gain = std::sqrt(prm.mu / prm.gamma);
  const double edge_gain = prm.lambda / std::sqrt(prm.d);
  const double centering_coeff = opts.exact_onsager
                                     ? prm.lambda * std::sqrt(prm.d) / (nd - prm.d)
                                     : prm.lambda * std::sqrt(prm.d) / nd;

  MessageState next;
  next.step = state.step + 1;
  next.eta_prev = state.eta;
  next.eta_edge_prev = state.eta_edge;
  next.m_prev = state.m;

  // Covariate field plus memory term, shared by vertex and edge updates.
  Eigen::VectorXd field = cov_gain * (b.transpose() * state.m);
  if (opts.exact_onsager) {
    const Eigen::VectorXd weight = b.array().square().matrix().transpose() * state.tau.cwiseInverse();
    field.array() -= (prm.mu / prm.gamma) * weight.array() * state.eta_prev.array();
  } else {
    field -= (prm.mu / prm.gamma) * state.eta_prev;
  }
  field.array() -= centering_coeff * state.eta.sum();

  next.eta.resize(prm.n);
  next.eta_edge.resize(graph.num_directed());
  for (std::int64_t i = 0; i < prm.n; ++i) {
    double incoming = 0.0;
    for (std::int64_t s = graph.begin(i); s < graph.end(i); ++s) {
      incoming += state.eta_edge[graph.reverse(s)];
    }
    const double vertex = field[i] + edge_gain * incoming;
    next.eta[i] = vertex;
    for (std::int64_t s = graph.begin(i); s < graph.end(i); ++s) {
      next.eta_edge[s] = vertex - edge_gain * state.eta_edge[graph.reverse(s)];
    }
  }

  if (opts.exact_onsager) {
    const Eigen::VectorXd row_sq = b.rowwise().squaredNorm();
    next.tau = (1.0 + prm.mu - (prm.mu / prm.gamma) * row_sq.array()).inverse().matrix();
    next.m = (cov_gain * (b * state.eta).array() -
              (prm.mu / prm.gamma) * row_sq.array() * state.m_prev.array()) /
             next.tau.array();
  } else {
    next.tau = state.tau;
    next.m = cov_gain * (b * state.eta) - prm.mu * state.m_prev;
  }
  return next;
}

Decision null_test(double norm0, double norm_t) {
  return norm_t > norm0 ? Decision::kReject : Decision::kAccept;
}

LinBPResult linbp_run_from(const Instance& inst, MessageState init, std::int64_t t_max,
                           const LinBPOptions& opts) {
  if (t_max < 0) throw ConfigError("t_max must be >= 0");
  init.check_against(inst);
  LinBPResult result;
  result.initial = init;
  result.trace.reserve(static_cast<std::size_t>(t_max) + 1);
  result.trace.push_back(summarize(inst, init));
  MessageState state = std::move(init);
  for (std::int64_t t = 0; t < t_max; ++t) {
    state = linbp_step(inst, state, opts);
    result.trace.push_back(summarize(inst, state));
  }
  result.v_hat = estimate_labels(state.eta);
  result.decision = null_test(result.initial.eta.norm(), state.eta.norm());
  result.final_state = std::move(state);
  return result;
}

LinBPResult linbp_run(const Instance& inst, std::int64_t t_max, double init_scale,
                      std::uint64_t seed, const LinBPOptions& opts) {
  return linbp_run_from(inst, random_state(inst, init_scale, seed, false), t_max, opts);
}

}  // namespace csbm
