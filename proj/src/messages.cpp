#include "csbm/messages.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "csbm/metrics.hpp"
#include "csbm/rng.hpp"

namespace csbm {

MessageState MessageState::zeros(const Instance& inst) {
  const auto n = inst.params.n;
  const auto p = inst.params.p;
  const auto e = inst.graph.num_directed();
  MessageState s;
  s.eta = Eigen::VectorXd::Zero(n);
  s.eta_prev = Eigen::VectorXd::Zero(n);
  s.eta_edge = Eigen::VectorXd::Zero(e);
  s.eta_edge_prev = Eigen::VectorXd::Zero(e);
  s.m = Eigen::VectorXd::Zero(p);
  s.m_prev = Eigen::VectorXd::Zero(p);
  s.tau = Eigen::VectorXd::Ones(p);
  return s;
}

void MessageState::check_against(const Instance& inst) const {
  const auto n = inst.params.n;
  const auto p = inst.params.p;
  const auto e = inst.graph.num_directed();
  if (inst.graph.num_nodes() != n || inst.covariates.rows() != p || inst.covariates.cols() != n) {
    throw std::invalid_argument("instance dimensions are inconsistent");
  }
  if (eta.size() != n || eta_prev.size() != n) {
    throw std::invalid_argument("message state: vertex vector size mismatch");
  }
  if (eta_edge.size() != e || eta_edge_prev.size() != e) {
    throw std::invalid_argument("message state: directed-edge index mismatch");
  }
  if (m.size() != p || m_prev.size() != p || tau.size() != p) {
    throw std::invalid_argument("message state: covariate vector size mismatch");
  }
}

MessageState combine(double alpha, const MessageState& x, double beta, const MessageState& y) {
  MessageState out = x;
  out.eta = alpha * x.eta + beta * y.eta;
  out.eta_edge = alpha * x.eta_edge + beta * y.eta_edge;
  out.m = alpha * x.m + beta * y.m;
  out.eta_prev = alpha * x.eta_prev + beta * y.eta_prev;
  out.eta_edge_prev = alpha * x.eta_edge_prev + beta * y.eta_edge_prev;
  out.m_prev = alpha * x.m_prev + beta * y.m_prev;
  return out;
}

MessageState negate_messages(const MessageState& s) { return combine(-1.0, s, 0.0, s); }

double max_abs_diff(const MessageState& a, const MessageState& b) {
  auto diff = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
    return x.size() == 0 ? 0.0 : (x - y).cwiseAbs().maxCoeff();
  };
  double worst = 0.0;
  worst = std::max(worst, diff(a.eta, b.eta));
  worst = std::max(worst, diff(a.eta_edge, b.eta_edge));
  worst = std::max(worst, diff(a.m, b.m));
  worst = std::max(worst, diff(a.eta_prev, b.eta_prev));
  worst = std::max(worst, diff(a.eta_edge_prev, b.eta_edge_prev));
  worst = std::max(worst, diff(a.m_prev, b.m_prev));
  return worst;
}

StepSummary summarize(const Instance& inst, const MessageState& state) {
  StepSummary s;
  s.step = state.step;
  s.eta_norm = state.eta.norm();
  s.m_norm = state.m.norm();
  const auto labels = estimate_labels(state.eta);
  s.overlap = overlap(std::span<const int>(labels), std::span<const int>(inst.truth.v));
  s.cov_overlap = s.m_norm > 0.0 ? covariate_overlap(state.m, inst.truth.u) : 0.0;
  s.saturated = state.eta.size() > 0 && state.eta.cwiseAbs().maxCoeff() > 50.0;
  return s;
}

MessageState random_state(const Instance& inst, double init_scale, std::uint64_t seed,
                          bool random_history) {
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be >= 0");
  MessageState s = MessageState::zeros(inst);
  Rng rng(seed, stream::kMessageInit);
  std::normal_distribution<double> normal(0.0, std::sqrt(init_scale));
  auto fill = [&](Eigen::VectorXd& x) {
    for (auto& xi : x) xi = normal(rng);
  };
  fill(s.eta);
  fill(s.eta_edge);
  fill(s.m);
  if (random_history) {
    fill(s.eta_prev);
    fill(s.eta_edge_prev);
    fill(s.m_prev);
  }
  return s;
}

std::vector<int> estimate_labels(const Eigen::VectorXd& eta) {
  std::vector<int> labels(static_cast<std::size_t>(eta.size()));
  for (Eigen::Index i = 0; i < eta.size(); ++i) labels[i] = eta[i] < 0.0 ? -1 : 1;
  return labels;
}

}  // namespace csbm
