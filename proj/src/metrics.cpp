#include "csbm/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace csbm {

double overlap(const Eigen::VectorXd& v_hat, std::span<const int> v) {
  if (static_cast<std::size_t>(v_hat.size()) != v.size()) {
    throw std::invalid_argument("overlap: dimension mismatch");
  }
  const double norm = v_hat.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("overlap: zero estimate");
  double dot = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) dot += v_hat[static_cast<Eigen::Index>(i)] * v[i];
  const double n = static_cast<double>(v.size());
  // Rescale to ||v_hat|| = sqrt(n): <v_hat, v> sqrt(n) / ||v_hat|| / n.
  return std::min(1.0, std::abs(dot) / (norm * std::sqrt(n)));
}

double overlap(std::span<const int> v_hat, std::span<const int> v) {
  if (v_hat.size() != v.size()) throw std::invalid_argument("overlap: dimension mismatch");
  if (v.empty()) throw std::invalid_argument("overlap: zero estimate");
  long long dot = 0;
  for (std::size_t i = 0; i < v.size(); ++i) dot += static_cast<long long>(v_hat[i]) * v[i];
  return std::abs(static_cast<double>(dot)) / static_cast<double>(v.size());
}

double covariate_overlap(const Eigen::VectorXd& u_hat, const Eigen::VectorXd& u) {
  if (u_hat.size() != u.size()) throw std::invalid_argument("covariate_overlap: dimension mismatch");
  const double a = u_hat.norm();
  const double b = u.norm();
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("covariate_overlap: zero vector");
  return std::min(1.0, std::abs(u_hat.dot(u)) / (a * b));
}

}  // namespace csbm
