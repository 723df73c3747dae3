#include <doctest.h>

#include <cmath>
#include <map>

#include "csbm/linbp.hpp"
#include "support.hpp"

using namespace csbm;
using csbm::testing::random_messages;

namespace {

Instance small_instance(double lambda, double mu, std::uint64_t seed, std::int64_t n = 50) {
  return sample_contextual(derive_params(n, 30, 4, lambda, mu), seed);
}

// Graph-only linearized update written directly over the edge list, for
// mu = 0: eta_{i->j} = (lambda/sqrt d) sum_{k in di \ j} eta_{k->i}
//                      - (lambda sqrt d / n) sum_k eta_k.
std::map<std::pair<int, int>, double> nonbacktracking_step(const Instance& inst,
                                                           const MessageState& s,
                                                           Eigen::VectorXd& eta_out) {
  const auto& g = inst.graph;
  const auto& prm = inst.params;
  std::map<std::pair<int, int>, double> msg;  // (from, to) -> eta_{from->to}
  for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
    for (std::int64_t slot = g.begin(i); slot < g.end(i); ++slot) msg[{int(i), g.target(slot)}] = s.eta_edge[slot];
  }
  const double center = prm.lambda * std::sqrt(prm.d) / prm.n * s.eta.sum();
  std::map<std::pair<int, int>, double> out;
  eta_out.resize(prm.n);
  for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
    double all = 0.0;
    for (std::int64_t slot = g.begin(i); slot < g.end(i); ++slot) all += msg[{g.target(slot), int(i)}];
    eta_out[i] = prm.lambda / std::sqrt(prm.d) * all - center;
    for (std::int64_t slot = g.begin(i); slot < g.end(i); ++slot) {
      const int j = g.target(slot);
      double sum = 0.0;
      for (std::int64_t other = g.begin(i); other < g.end(i); ++other) {
        if (g.target(other) != j) sum += msg[{g.target(other), int(i)}];
      }
      out[{int(i), j}] = prm.lambda / std::sqrt(prm.d) * sum - center;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("zero state is a fixed point") {
  const Instance inst = small_instance(1.0, 0.8, 1);
  const MessageState zero = MessageState::zeros(inst);
  for (bool exact : {false, true}) {
    const MessageState next = linbp_step(inst, zero, {exact});
    CHECK(next.eta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(next.m.cwiseAbs().maxCoeff() == 0.0);
    CHECK((next.eta_edge.size() == 0 || next.eta_edge.cwiseAbs().maxCoeff() == 0.0));
    CHECK(next.step == 1);
  }
}

TEST_CASE("mu = 0 reduces to the nonbacktracking update") {
  const Instance inst = small_instance(1.3, 0.0, 2);
  REQUIRE(inst.graph.num_edges() > 20);
  MessageState s = random_messages(inst, 1.0, 3);
  s.tau.setOnes();
  const MessageState next = linbp_step(inst, s);
  Eigen::VectorXd eta_ref;
  const auto ref = nonbacktracking_step(inst, s, eta_ref);
  double worst = (next.eta - eta_ref).cwiseAbs().maxCoeff();
  const auto& g = inst.graph;
  for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
    for (std::int64_t slot = g.begin(i); slot < g.end(i); ++slot) {
      worst = std::max(worst, std::abs(next.eta_edge[slot] - ref.at({int(i), g.target(slot)})));
    }
  }
  // Same terms, summed in a different order.
  CHECK(worst < 1e-13);
  CHECK(next.m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hand-evaluated two-node step") {
  Instance inst;
  inst.params.n = 2;
  inst.params.p = 2;
  inst.params.d = 4;
  inst.params.lambda = 1;
  inst.params.mu = 0;
  inst.params.gamma = 1;
  inst.graph = Graph(2, {{0, 1}});
  inst.covariates = Eigen::MatrixXd::Zero(2, 2);
  inst.truth.v = {1, -1};
  inst.truth.u = Eigen::VectorXd::Zero(2);
  MessageState s = MessageState::zeros(inst);
  // Slot of the directed edge 2 -> 1 (0-based: 1 -> 0) lives in row 1.
  s.eta_edge[inst.graph.begin(1)] = 1.0;
  const MessageState next = linbp_step(inst, s);
  CHECK(next.eta[0] == doctest::Approx(0.5));
  CHECK(next.eta[1] == 0.0);
  // The edge 1 -> 2 excludes its own reverse message.
  CHECK(next.eta_edge[inst.graph.begin(0)] == 0.0);
}

TEST_CASE("linbp_step is linear") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = small_instance(1.0, 1.1, 10 + seed);
    const MessageState a = random_messages(inst, 1.0, seed);
    MessageState b = random_messages(inst, 1.0, seed + 100);
    b.tau = a.tau;
    const double alpha = 0.3 + seed, beta = -1.7;
    for (bool exact : {false, true}) {
      const MessageState lhs = linbp_step(inst, combine(alpha, a, beta, b), {exact});
      const MessageState rhs = combine(alpha, linbp_step(inst, a, {exact}), beta, linbp_step(inst, b, {exact}));
      const double scale = std::max(1.0, lhs.eta.cwiseAbs().maxCoeff());
      CHECK(max_abs_diff(lhs, rhs) < 1e-12 * scale);
    }
  }
}

TEST_CASE("sign flip commutes with linbp_step") {
  const Instance inst = small_instance(0.9, 0.9, 4);
  const MessageState s = random_messages(inst, 1.0, 5);
  const MessageState lhs = linbp_step(inst, negate_messages(s));
  const MessageState rhs = negate_messages(linbp_step(inst, s));
  CHECK(max_abs_diff(lhs, rhs) == 0.0);
}

TEST_CASE("vertex and edge messages differ by the reverse message") {
  const Instance inst = small_instance(1.5, 0.6, 6, 200);
  const MessageState s = random_messages(inst, 1.0, 7);
  const MessageState next = linbp_step(inst, s);
  const double gain = inst.params.lambda / std::sqrt(inst.params.d);
  const auto& g = inst.graph;
  double worst = 0.0;
  for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
    for (std::int64_t slot = g.begin(i); slot < g.end(i); ++slot) {
      const double lhs = next.eta[i] - next.eta_edge[slot];
      worst = std::max(worst, std::abs(lhs - gain * s.eta_edge[g.reverse(slot)]));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("linbp_step leaves its input alone and checks indices") {
  const Instance inst = small_instance(1.0, 1.0, 8);
  const MessageState s = random_messages(inst, 1.0, 9);
  const MessageState copy = s;
  linbp_step(inst, s);
  CHECK(max_abs_diff(s, copy) == 0.0);
  MessageState bad = s;
  bad.eta_edge.conservativeResize(bad.eta_edge.size() - 1);
  CHECK_THROWS_AS(linbp_step(inst, bad), std::invalid_argument);
  bad = s;
  bad.m.resize(3);
  CHECK_THROWS_AS(linbp_step(inst, bad), std::invalid_argument);
}

TEST_CASE("linbp_run with t_max = 0 returns the initialization") {
  const Instance inst = small_instance(1.0, 1.0, 10);
  const LinBPResult r = linbp_run(inst, 0, 0.01, 3);
  CHECK(r.trace.size() == 1);
  CHECK(max_abs_diff(r.initial, r.final_state) == 0.0);
  CHECK(r.decision == Decision::kAccept);
  // History copies start at zero; the others have variance 0.01.
  CHECK(r.initial.eta_prev.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.initial.m_prev.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.initial.eta.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("random initialization has variance init_scale") {
  const Instance inst = sample_contextual(derive_params(20000, 10000, 5, 0.5, 0.5), 1);
  const MessageState s = random_state(inst, 0.01, 4, false);
  const double var = s.eta.squaredNorm() / s.eta.size();
  CHECK(std::abs(var - 0.01) < 4 * 0.01 * std::sqrt(2.0 / s.eta.size()));
  const double var_m = s.m.squaredNorm() / s.m.size();
  CHECK(std::abs(var_m - 0.01) < 4 * 0.01 * std::sqrt(2.0 / s.m.size()));
}

TEST_CASE("estimate_labels examples") {
  Eigen::VectorXd eta(3);
  eta << 1.2, -0.3, 0.0;
  CHECK(estimate_labels(eta) == std::vector<int>{1, -1, 1});
  CHECK(estimate_labels(-eta) == std::vector<int>{-1, 1, 1});
  const std::vector<int> v = {1, -1, -1, 1, 1};
  Eigen::VectorXd cv(5);
  for (int i = 0; i < 5; ++i) cv[i] = 2.5 * v[i];
  CHECK(estimate_labels(cv) == v);
  CHECK(overlap(std::span<const int>(estimate_labels(cv)), std::span<const int>(v)) == 1.0);
}

TEST_CASE("null_test examples") {
  CHECK(null_test(1.0, 5.0) == Decision::kReject);
  CHECK(null_test(1.0, 1.0) == Decision::kAccept);
  CHECK(null_test(1.0, 0.5) == Decision::kAccept);
}

TEST_CASE("linbp at n = 800, p = 1000, d = 5") {
  auto run = [](double lambda, double mu, std::uint64_t seed) {
    const Instance inst = sample_contextual(derive_params(800, 1000, 5, lambda, mu), seed);
    return linbp_run(inst, 50, 0.01, seed);
  };
  int grows = 0, low_overlap = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LinBPResult sup = run(0.9, 0.9, seed);
    grows += sup.trace.back().eta_norm > sup.trace.front().eta_norm;
    const LinBPResult sub = run(0.2, 0.2, 100 + seed);
    low_overlap += sub.trace.back().overlap <= 0.1;
  }
  CHECK(grows >= 18);
  CHECK(low_overlap >= 18);

  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) rejections += run(0.0, 0.0, 500 + seed).decision == Decision::kReject;
  CHECK(rejections <= 10);
}
