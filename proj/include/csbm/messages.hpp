#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "csbm/model.hpp"

namespace csbm {

/// Message-passing iterates at step t together with the t-1 copies that the
/// memory (Onsager) terms read. eta_edge is indexed by the graph's directed
/// slots (see Graph).
struct MessageState {
  Eigen::VectorXd eta;
  Eigen::VectorXd eta_edge;
  Eigen::VectorXd m;
  Eigen::VectorXd eta_prev;
  Eigen::VectorXd eta_edge_prev;
  Eigen::VectorXd m_prev;
  Eigen::VectorXd tau;  // covariate variances; 1 unless fullbp updates them
  std::int64_t step = 0;

  /// All-zero state sized for the instance, tau = 1.
  static MessageState zeros(const Instance& inst);

  /// Throws std::invalid_argument if any vector does not match the
  /// instance's dimensions or directed-edge index.
  void check_against(const Instance& inst) const;
};

/// alpha * x + beta * y, componentwise over every message vector (tau and
/// step are taken from x).
MessageState combine(double alpha, const MessageState& x, double beta, const MessageState& y);

/// (eta, eta_edge, m) and their previous copies negated; tau kept.
MessageState negate_messages(const MessageState& s);

/// Largest absolute difference over all message vectors.
double max_abs_diff(const MessageState& a, const MessageState& b);

/// Per-step diagnostics shared by linbp and fullbp.
struct StepSummary {
  std::int64_t step = 0;
  double eta_norm = 0.0;
  double m_norm = 0.0;
  double overlap = 0.0;
  double cov_overlap = 0.0;
  bool saturated = false;
};

StepSummary summarize(const Instance& inst, const MessageState& state);

/// Random initialization: eta, eta_edge, m i.i.d. N(0, init_scale). When
/// random_history is set the t = -1 copies are drawn too, otherwise they
/// are zero.
MessageState random_state(const Instance& inst, double init_scale, std::uint64_t seed,
                          bool random_history);

/// sgn(eta_i) with sgn(0) = +1.
std::vector<int> estimate_labels(const Eigen::VectorXd& eta);

}  // namespace csbm
