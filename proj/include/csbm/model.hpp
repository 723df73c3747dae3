#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace csbm {

/// Raised for invalid model/algorithm parameters. The CLI maps it to exit
/// code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem dimensions, signal strengths and the derived edge rates.
struct ModelParams {
  std::int64_t n = 0;
  std::int64_t p = 0;
  double d = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double gamma = 0.0;  // n / p
  double c_in = 0.0;   // d + lambda sqrt(d)
  double c_out = 0.0;  // d - lambda sqrt(d)

  bool operator==(const ModelParams&) const = default;
};

/// Validates and completes the parameters of the sparse model.
/// Throws ConfigError if c_out < 0 (lambda > sqrt(d)) or c_in > n.
ModelParams derive_params(std::int64_t n, std::int64_t p, double d, double lambda, double mu);

/// Parameters for the Gaussian observation model, which has no graph: d and
/// the edge rates are left at zero and never read.
ModelParams derive_gaussian_params(std::int64_t n, std::int64_t p, double lambda, double mu);

struct Latents {
  std::vector<int> v;  // labels in {+1, -1}
  Eigen::VectorXd u;   // p coordinates, variance 1/p each

  bool operator==(const Latents& o) const { return v == o.v && u == o.u; }
};

/// Undirected simple graph in CSR form. Slot s in row i stands for the
/// directed edge i -> neighbors[s]; reverse[s] is the slot of the opposite
/// direction. Rows are sorted, so the layout is a pure function of the edge
/// set.
class Graph {
 public:
  Graph() = default;
  /// Builds from undirected pairs; duplicates and self-loops are rejected.
  Graph(std::int64_t num_nodes, std::vector<std::pair<std::int32_t, std::int32_t>> edges);

  std::int64_t num_nodes() const { return static_cast<std::int64_t>(offsets_.size()) - 1; }
  std::int64_t num_edges() const { return static_cast<std::int64_t>(neighbors_.size()) / 2; }
  std::int64_t num_directed() const { return static_cast<std::int64_t>(neighbors_.size()); }

  std::int64_t begin(std::int64_t i) const { return offsets_[i]; }
  std::int64_t end(std::int64_t i) const { return offsets_[i + 1]; }
  std::int64_t degree(std::int64_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::int32_t target(std::int64_t slot) const { return neighbors_[slot]; }
  std::int64_t reverse(std::int64_t slot) const { return reverse_[slot]; }

  /// Sorted list of pairs (i, j) with i < j.
  std::vector<std::pair<std::int32_t, std::int32_t>> edge_list() const;

  bool operator==(const Graph& o) const {
    return offsets_ == o.offsets_ && neighbors_ == o.neighbors_;
  }

 private:
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int32_t> neighbors_;
  std::vector<std::int64_t> reverse_;
};

/// One draw of the sparse contextual model: graph, covariates B (p x n,
/// column i is b_i), and the ground truth.
struct Instance {
  Graph graph;
  Eigen::MatrixXd covariates;
  Latents truth;
  ModelParams params;
  std::uint64_t seed = 0;
};

/// One draw of the Gaussian observation model.
struct GaussianInstance {
  Eigen::MatrixXd matrix_a;  // n x n, exactly symmetric
  Eigen::MatrixXd covariates;
  Latents truth;
  ModelParams params;
  std::uint64_t seed = 0;
};

Latents sample_latents(const ModelParams& params, std::uint64_t seed);

/// Sparse model: pairs with equal labels connect with probability c_in/n,
/// others with c_out/n; b_i = sqrt(mu/n) v_i u + Z_i / sqrt(p).
Instance sample_contextual(const ModelParams& params, std::uint64_t seed);

/// Same distribution as sample_contextual but with naive O(n^2) pair
/// sampling. Slow; kept for cross-checking the skip sampler.
Graph sample_graph_naive(const ModelParams& params, const std::vector<int>& labels,
                         std::uint64_t seed);

/// Gaussian model: A = lambda v v^T / n + W (off-diagonal variance 1/n,
/// diagonal variance 2/n), B_ai ~ N(sqrt(mu) v_i u_a / sqrt(n), 1/p).
GaussianInstance sample_gaussian(const ModelParams& params, std::uint64_t seed);

}  // namespace csbm
