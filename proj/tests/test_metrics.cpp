#include <doctest.h>

#include <cmath>
#include <numbers>

#include "csbm/metrics.hpp"
#include "support.hpp"

using namespace csbm;
using csbm::testing::gaussian_vector;

namespace {

std::vector<int> random_signs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed, 5);
  std::vector<int> v(n);
  for (auto& x : v) x = (rng() >> 63) ? 1 : -1;
  return v;
}

Eigen::VectorXd as_real(const std::vector<int>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

}  // namespace

TEST_CASE("overlap examples") {
  const auto v = random_signs(1000, 1);
  std::vector<int> neg(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
  CHECK(overlap(std::span<const int>(v), std::span<const int>(v)) == 1.0);
  CHECK(overlap(std::span<const int>(neg), std::span<const int>(v)) == 1.0);
  CHECK(overlap(as_real(v), v) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("overlap of independent signs is at chance level") {
  const std::size_t n = 10000;
  const auto v = random_signs(n, 2);
  double sum = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const auto w = random_signs(n, 100 + draw);
    sum += overlap(std::span<const int>(w), std::span<const int>(v));
  }
  const double mean = sum / 100.0;
  CHECK(std::abs(mean - std::sqrt(2.0 / (std::numbers::pi * n))) < 0.004);
}

TEST_CASE("overlap is scale invariant and bounded") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto v = random_signs(200, seed);
    const Eigen::VectorXd x = gaussian_vector(200, seed);
    const double base = overlap(x, v);
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);
    for (double c : {-3.0, 1e-6, 17.0}) CHECK(overlap(c * x, v) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("overlap errors") {
  const auto v = random_signs(10, 3);
  CHECK_THROWS(overlap(Eigen::VectorXd::Zero(10), v));
  CHECK_THROWS(overlap(Eigen::VectorXd::Ones(9), v));
}

TEST_CASE("covariate overlap examples") {
  const Eigen::VectorXd u = gaussian_vector(50, 4);
  CHECK(covariate_overlap(u, u) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(covariate_overlap(-2.0 * u, u) == doctest::Approx(1.0).epsilon(1e-14));
  // w orthogonal to u with the same norm.
  Eigen::VectorXd w = gaussian_vector(50, 5);
  w -= (w.dot(u) / u.squaredNorm()) * u;
  w *= u.norm() / w.norm();
  CHECK(std::abs(covariate_overlap(w, u)) < 1e-12);
  CHECK(std::abs(covariate_overlap((u + w).normalized(), u) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK_THROWS(covariate_overlap(Eigen::VectorXd::Zero(50), u));
  CHECK_THROWS(covariate_overlap(u, Eigen::VectorXd::Zero(50)));
  CHECK_THROWS(covariate_overlap(u.head(10), u));
}

TEST_CASE("covariate overlap stays in [0, 1]") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double c = covariate_overlap(gaussian_vector(7, seed), gaussian_vector(7, seed + 1000));
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
}
