#include <doctest.h>

#include <cmath>

#include "csbm/fullbp.hpp"
#include "csbm/linbp.hpp"
#include "support.hpp"

using namespace csbm;
using csbm::testing::random_messages;

namespace {

Instance small_instance(double lambda, double mu, std::uint64_t seed, std::int64_t n = 50,
                        std::int64_t p = 30) {
  return sample_contextual(derive_params(n, p, 4, lambda, mu), seed);
}

MessageState scaled(const MessageState& s, double h) {
  MessageState out = combine(h, s, 0.0, s);
  out.tau = s.tau;
  return out;
}

}  // namespace

TEST_CASE("f_rho examples") {
  CHECK(f_rho(0.0, 0.7) == 0.0);
  CHECK(f_rho(0.0, 0.0) == 0.0);
  CHECK(f_rho(1e3, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f_rho(1e6, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f_rho(-1e300, 0.5) == doctest::Approx(-0.5).epsilon(1e-15));
  // References from 30-digit evaluation of the log-cosh ratio.
  CHECK(std::abs(f_rho(0.01, 0.5) - 0.0046212) < 1e-6);
  CHECK(f_rho(0.01, 0.5) == doctest::Approx(0.00462105043222998).epsilon(1e-13));
  CHECK(f_rho(3.0, 0.7) == doctest::Approx(0.695304706983301).epsilon(1e-13));
  CHECK(f_rho(-2.5, 1.2) == doctest::Approx(-1.16448318702729).epsilon(1e-13));
  CHECK(log_cosh(20.0) == doctest::Approx(19.3068528194401).epsilon(1e-14));
}

TEST_CASE("f_rho is odd and bounded by rho") {
  Rng rng(1, 1);
  for (int k = 0; k < 2000; ++k) {
    const double z = (rng.uniform() - 0.5) * std::pow(10.0, 6 * rng.uniform() - 2);
    const double rho = 3.0 * rng.uniform();
    CHECK(std::abs(f_rho(z, rho)) <= rho);
    CHECK(f_rho(-z, rho) == -f_rho(z, rho));
  }
}

TEST_CASE("make_bp_config") {
  const auto prm = derive_params(800, 1000, 5, 1.0, 0.5);
  const BPConfig cfg = make_bp_config(prm, 50, 0.01);
  CHECK(std::tanh(cfg.rho) == doctest::Approx(1.0 / std::sqrt(5.0)));
  CHECK(std::tanh(cfg.rho_n) == doctest::Approx(std::sqrt(5.0) / 795.0));
  CHECK_THROWS_AS(make_bp_config(derive_params(100, 100, 4, 2, 0)), ConfigError);
  CHECK_THROWS_AS(make_bp_config(prm, -1), ConfigError);
}

TEST_CASE("zero state: messages stay zero and tau is near one") {
  const Instance inst = sample_contextual(derive_params(1000, 1000, 5, 0.5, 0.5), 2);
  const BPConfig cfg = make_bp_config(inst.params);
  const MessageState next = fullbp_step(inst, MessageState::zeros(inst), cfg);
  CHECK(next.eta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(next.m.cwiseAbs().maxCoeff() == 0.0);
  CHECK(next.tau.minCoeff() >= 0.9);
  CHECK(next.tau.maxCoeff() <= 1.1);
  // Direct evaluation of the tau update.
  const Eigen::VectorXd rows = inst.covariates.rowwise().squaredNorm();
  for (Eigen::Index q = 0; q < rows.size(); ++q) {
    CHECK(next.tau[q] == doctest::Approx(1.0 / (1.5 - 0.5 * rows[q])).epsilon(1e-14));
  }
}

TEST_CASE("mu = 0: graph-only BP") {
  const Instance inst = small_instance(1.2, 0.0, 3);
  const BPConfig cfg = make_bp_config(inst.params);
  const MessageState s = random_messages(inst, 1.0, 4);
  const MessageState next = fullbp_step(inst, s, cfg);
  const auto& g = inst.graph;
  double mean_field = 0.0;
  for (Eigen::Index k = 0; k < s.eta.size(); ++k) mean_field += f_rho(s.eta[k], cfg.rho_n);
  double worst = 0.0;
  for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
    double all = 0.0;
    for (std::int64_t a = g.begin(i); a < g.end(i); ++a) all += f_rho(s.eta_edge[g.reverse(a)], cfg.rho);
    worst = std::max(worst, std::abs(next.eta[i] - (all - mean_field)));
    for (std::int64_t a = g.begin(i); a < g.end(i); ++a) {
      double excl = 0.0;
      for (std::int64_t b = g.begin(i); b < g.end(i); ++b) {
        if (b != a) excl += f_rho(s.eta_edge[g.reverse(b)], cfg.rho);
      }
      worst = std::max(worst, std::abs(next.eta_edge[a] - (excl - mean_field)));
    }
  }
  CHECK(worst < 1e-12);
  CHECK(next.m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("small messages: fullbp matches the exact linearization") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = small_instance(1.1, 0.9, 10 + seed);
    const BPConfig cfg = make_bp_config(inst.params);
    MessageState s = random_messages(inst, 1.0, seed);
    const double peak = std::max({s.eta.cwiseAbs().maxCoeff(), s.eta_edge.cwiseAbs().maxCoeff(),
                                  s.m.cwiseAbs().maxCoeff(), s.eta_prev.cwiseAbs().maxCoeff(),
                                  s.eta_edge_prev.cwiseAbs().maxCoeff(), s.m_prev.cwiseAbs().maxCoeff()});
    s = scaled(s, 1e-4 / peak);
    const MessageState full = fullbp_step(inst, s, cfg);
    const MessageState lin = linbp_step(inst, s, {true});
    CHECK(max_abs_diff(full, lin) <= 1e-7);
    CHECK((full.tau - lin.tau).cwiseAbs().maxCoeff() <= 1e-7);
  }
}

TEST_CASE("finite-difference derivative at zero matches linbp") {
  const Instance inst = small_instance(1.3, 1.0, 20);
  const BPConfig cfg = make_bp_config(inst.params);
  MessageState dir = random_messages(inst, 1.0, 21);
  dir.tau.setOnes();
  const double h = 1e-5;
  const MessageState plus = fullbp_step(inst, scaled(dir, h), cfg);
  const MessageState minus = fullbp_step(inst, scaled(dir, -h), cfg);
  const MessageState lin = linbp_step(inst, dir, {true});
  auto rel = [](const Eigen::VectorXd& fd, const Eigen::VectorXd& ref) {
    return (fd - ref).norm() / ref.norm();
  };
  CHECK(rel((plus.eta - minus.eta) / (2 * h), lin.eta) < 1e-4);
  CHECK(rel((plus.eta_edge - minus.eta_edge) / (2 * h), lin.eta_edge) < 1e-4);
  CHECK(rel((plus.m - minus.m) / (2 * h), lin.m) < 1e-4);
}

TEST_CASE("sign flip commutes with fullbp_step") {
  const Instance inst = small_instance(1.0, 1.0, 30);
  const BPConfig cfg = make_bp_config(inst.params);
  const MessageState s = random_messages(inst, 2.0, 31);
  const MessageState lhs = fullbp_step(inst, negate_messages(s), cfg);
  const MessageState rhs = negate_messages(fullbp_step(inst, s, cfg));
  CHECK(max_abs_diff(lhs, rhs) == 0.0);
  CHECK((lhs.tau - rhs.tau).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tau failure is reported") {
  // Rows of B with sum of squares 4 drive 1 + mu - (mu/gamma) * 4 below 0.
  Instance inst = testing::hand_instance(4, 4, 1, 0.5, 1.0, {{0, 1}, {2, 3}}, Eigen::MatrixXd::Ones(4, 4),
                                         {1, 1, -1, -1}, Eigen::VectorXd::Ones(4) * 0.5);
  const BPConfig cfg = make_bp_config(inst.params);
  CHECK_THROWS_AS(fullbp_step(inst, MessageState::zeros(inst), cfg), NumericalError);
  MessageState bad = MessageState::zeros(inst);
  bad.tau[0] = 0.0;
  CHECK_THROWS_AS(fullbp_step(inst, bad, cfg), NumericalError);
  bad.tau.resize(2);
  CHECK_THROWS_AS(fullbp_step(inst, bad, cfg), std::invalid_argument);
}

TEST_CASE("fullbp_run outputs") {
  const Instance inst = sample_contextual(derive_params(400, 500, 5, 1.0, 1.0), 40);
  const BPConfig cfg = make_bp_config(inst.params, 20);
  const FullBPResult r = fullbp_run(inst, cfg, 41);
  CHECK(r.trace.size() == 21);
  CHECK(r.u_hat.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.final_state.tau.minCoeff() > 0.0);
  // The -1 iterates are random too.
  CHECK(r.initial.eta_prev.cwiseAbs().maxCoeff() > 0.0);
  CHECK(r.initial.m_prev.cwiseAbs().maxCoeff() > 0.0);
  CHECK(r.initial.tau == Eigen::VectorXd::Ones(500));
  CHECK(r.v_hat == estimate_labels(r.final_state.eta));

  // mu = 0 keeps m at zero: u_hat is the zero vector and cov overlap 0.
  const Instance graph_only = sample_contextual(derive_params(400, 500, 5, 1.0, 0.0), 42);
  const FullBPResult g = fullbp_run(graph_only, cfg, 43);
  CHECK(g.u_hat.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.trace.back().cov_overlap == 0.0);
}

TEST_CASE("saturation flag") {
  const Instance inst = small_instance(1.0, 1.0, 50);
  MessageState s = MessageState::zeros(inst);
  CHECK_FALSE(summarize(inst, s).saturated);
  s.eta[3] = -50.5;
  CHECK(summarize(inst, s).saturated);
}

TEST_CASE("fullbp at n = 800, p = 1000, d = 5") {
  auto mean_overlap = [](double lambda, double mu) {
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Instance inst = sample_contextual(derive_params(800, 1000, 5, lambda, mu), seed);
      const FullBPResult r = fullbp_run(inst, make_bp_config(inst.params, 50, 0.01), seed);
      sum += overlap(r.v_hat, inst.truth.v);
    }
    return sum / 20.0;
  };
  CHECK(mean_overlap(0.9, 0.9) >= 0.3);
  CHECK(mean_overlap(0.3, 0.3) <= 0.1);
}
