#include "csbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "csbm/rng.hpp"

namespace csbm {

namespace {

void check_dimensions(std::int64_t n, std::int64_t p, double lambda, double mu) {
  if (n < 2 || p < 2) throw ConfigError("n and p must be at least 2");
  if (n > std::numeric_limits<std::int32_t>::max()) throw ConfigError("n too large");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("mu must be >= 0");
}

// Number of trials before the next success of a Bernoulli(q) sequence,
// i.e. a Geometric(q) draw on {0, 1, ...}, by inversion.
std::uint64_t geometric_skip(Rng& rng, double log1m_q, std::uint64_t cap) {
  const double r = 1.0 - rng.uniform();  // (0, 1]
  const double skip = std::floor(std::log(r) / log1m_q);
  if (!(skip < static_cast<double>(cap))) return cap;
  return static_cast<std::uint64_t>(skip);
}

using EdgeList = std::vector<std::pair<std::int32_t, std::int32_t>>;

// All pairs {members[a], members[b]} with a > b, each kept with probability
// q. Walks the lower triangle row by row, jumping geometric gaps.
void sample_within(const std::vector<std::int32_t>& members, double q, Rng& rng, EdgeList& out) {
  const auto s = static_cast<std::int64_t>(members.size());
  if (s < 2 || q <= 0.0) return;
  if (q >= 1.0) {
    for (std::int64_t a = 1; a < s; ++a)
      for (std::int64_t b = 0; b < a; ++b) out.emplace_back(members[a], members[b]);
    return;
  }
  const double log1m_q = std::log1p(-q);
  const auto total = static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(s - 1) / 2;
  std::int64_t row = 1;
  std::int64_t col = -1;
  while (row < s) {
    const std::uint64_t skip = geometric_skip(rng, log1m_q, total);
    if (skip >= total) break;
    col += 1 + static_cast<std::int64_t>(skip);
    while (col >= row && row < s) {
      col -= row;
      ++row;
    }
    if (row < s) out.emplace_back(members[row], members[col]);
  }
}

// All pairs (left[a], right[b]) kept with probability q.
void sample_across(const std::vector<std::int32_t>& left, const std::vector<std::int32_t>& right,
                   double q, Rng& rng, EdgeList& out) {
  const auto width = static_cast<std::uint64_t>(right.size());
  const std::uint64_t total = static_cast<std::uint64_t>(left.size()) * width;
  if (total == 0 || q <= 0.0) return;
  if (q >= 1.0) {
    for (auto a : left)
      for (auto b : right) out.emplace_back(a, b);
    return;
  }
  const double log1m_q = std::log1p(-q);
  std::uint64_t idx = 0;
  bool first = true;
  while (true) {
    const std::uint64_t skip = geometric_skip(rng, log1m_q, total);
    if (skip >= total) break;
    idx += (first ? 0 : 1) + skip;
    first = false;
    if (idx >= total) break;
    out.emplace_back(left[idx / width], right[idx % width]);
  }
}

Eigen::MatrixXd sample_covariates(const ModelParams& params, const Latents& truth,
                                  double signal_scale, std::uint64_t seed) {
  const auto n = params.n;
  const auto p = params.p;
  Rng rng(seed, stream::kCovariateNoise);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_scale = 1.0 / std::sqrt(static_cast<double>(p));
  Eigen::MatrixXd b(p, n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double s = signal_scale * truth.v[i];
    for (std::int64_t a = 0; a < p; ++a) b(a, i) = s * truth.u[a] + noise_scale * normal(rng);
  }
  return b;
}

}  // namespace

ModelParams derive_params(std::int64_t n, std::int64_t p, double d, double lambda, double mu) {
  check_dimensions(n, p, lambda, mu);
  if (!(d >= 1.0) || !std::isfinite(d)) throw ConfigError("d must be >= 1");
  ModelParams params;
  params.n = n;
  params.p = p;
  params.d = d;
  params.lambda = lambda;
  params.mu = mu;
  params.gamma = static_cast<double>(n) / static_cast<double>(p);
  params.c_in = d + lambda * std::sqrt(d);
  params.c_out = d - lambda * std::sqrt(d);
  if (lambda > std::sqrt(d)) {
    throw ConfigError("lambda exceeds sqrt(d): c_out would be negative");
  }
  if (params.c_in > static_cast<double>(n)) throw ConfigError("c_in exceeds n");
  params.c_out = std::max(params.c_out, 0.0);
  return params;
}

ModelParams derive_gaussian_params(std::int64_t n, std::int64_t p, double lambda, double mu) {
  check_dimensions(n, p, lambda, mu);
  ModelParams params;
  params.n = n;
  params.p = p;
  params.lambda = lambda;
  params.mu = mu;
  params.gamma = static_cast<double>(n) / static_cast<double>(p);
  return params;
}

Graph::Graph(std::int64_t num_nodes, EdgeList edges) {
  for (auto& [i, j] : edges) {
    if (i == j) throw std::invalid_argument("self-loop in edge list");
    if (i < 0 || j < 0 || i >= num_nodes || j >= num_nodes) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("duplicate edge in edge list");
  }

  offsets_.assign(num_nodes + 1, 0);
  for (const auto& [i, j] : edges) {
    ++offsets_[i + 1];
    ++offsets_[j + 1];
  }
  for (std::int64_t i = 0; i < num_nodes; ++i) offsets_[i + 1] += offsets_[i];
  neighbors_.resize(2 * edges.size());
  std::vector<std::int64_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [i, j] : edges) {
    neighbors_[fill[i]++] = j;
    neighbors_[fill[j]++] = i;
  }
  for (std::int64_t i = 0; i < num_nodes; ++i) {
    std::sort(neighbors_.begin() + offsets_[i], neighbors_.begin() + offsets_[i + 1]);
  }
  reverse_.resize(neighbors_.size());
  for (std::int64_t i = 0; i < num_nodes; ++i) {
    for (std::int64_t s = offsets_[i]; s < offsets_[i + 1]; ++s) {
      const std::int32_t j = neighbors_[s];
      auto row_begin = neighbors_.begin() + offsets_[j];
      auto row_end = neighbors_.begin() + offsets_[j + 1];
      auto it = std::lower_bound(row_begin, row_end, static_cast<std::int32_t>(i));
      reverse_[s] = it - neighbors_.begin();
    }
  }
}

EdgeList Graph::edge_list() const {
  EdgeList out;
  out.reserve(neighbors_.size() / 2);
  for (std::int64_t i = 0; i < num_nodes(); ++i) {
    for (std::int64_t s = begin(i); s < end(i); ++s) {
      if (neighbors_[s] > i) out.emplace_back(static_cast<std::int32_t>(i), neighbors_[s]);
    }
  }
  return out;
}

Latents sample_latents(const ModelParams& params, std::uint64_t seed) {
  Latents truth;
  Rng label_rng(seed, stream::kLabels);
  truth.v.resize(params.n);
  for (auto& vi : truth.v) vi = (label_rng() >> 63) ? 1 : -1;

  Rng latent_rng(seed, stream::kLatent);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(params.p)));
  truth.u.resize(params.p);
  for (auto& ua : truth.u) ua = normal(latent_rng);
  return truth;
}

Instance sample_contextual(const ModelParams& params, std::uint64_t seed) {
  // Re-validate: callers may hand-build a ModelParams.
  const ModelParams checked =
      derive_params(params.n, params.p, params.d, params.lambda, params.mu);
  Instance inst;
  inst.params = checked;
  inst.seed = seed;
  inst.truth = sample_latents(checked, seed);

  std::vector<std::int32_t> plus, minus;
  for (std::int64_t i = 0; i < checked.n; ++i) {
    (inst.truth.v[i] > 0 ? plus : minus).push_back(static_cast<std::int32_t>(i));
  }
  const double n = static_cast<double>(checked.n);
  Rng graph_rng(seed, stream::kGraph);
  EdgeList edges;
  edges.reserve(static_cast<std::size_t>(checked.d * n / 2 * 1.1) + 16);
  sample_within(plus, checked.c_in / n, graph_rng, edges);
  sample_within(minus, checked.c_in / n, graph_rng, edges);
  sample_across(plus, minus, checked.c_out / n, graph_rng, edges);
  inst.graph = Graph(checked.n, std::move(edges));

  inst.covariates =
      sample_covariates(checked, inst.truth, std::sqrt(checked.mu / n), seed);
  return inst;
}

Graph sample_graph_naive(const ModelParams& params, const std::vector<int>& labels,
                         std::uint64_t seed) {
  Rng rng(seed, stream::kGraph);
  const double n = static_cast<double>(params.n);
  EdgeList edges;
  for (std::int32_t i = 0; i < params.n; ++i) {
    for (std::int32_t j = i + 1; j < params.n; ++j) {
      const double q = (labels[i] == labels[j] ? params.c_in : params.c_out) / n;
      if (rng.uniform() < q) edges.emplace_back(i, j);
    }
  }
  return Graph(params.n, std::move(edges));
}

GaussianInstance sample_gaussian(const ModelParams& params, std::uint64_t seed) {
  const ModelParams checked =
      derive_gaussian_params(params.n, params.p, params.lambda, params.mu);
  GaussianInstance inst;
  inst.params = checked;
  // Keep whatever d the caller passed; it is carried along but unused.
  inst.params.d = params.d;
  inst.params.c_in = params.c_in;
  inst.params.c_out = params.c_out;
  inst.seed = seed;
  inst.truth = sample_latents(checked, seed);

  const auto n = checked.n;
  const double nd = static_cast<double>(n);
  Rng rng(seed, stream::kGaussianNoise);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double off_sd = 1.0 / std::sqrt(nd);
  const double diag_sd = std::sqrt(2.0 / nd);
  inst.matrix_a.resize(n, n);
  for (std::int64_t j = 0; j < n; ++j) {
    for (std::int64_t i = 0; i < j; ++i) {
      const double value =
          checked.lambda * inst.truth.v[i] * inst.truth.v[j] / nd + off_sd * normal(rng);
      inst.matrix_a(i, j) = value;
      inst.matrix_a(j, i) = value;
    }
    inst.matrix_a(j, j) = checked.lambda / nd + diag_sd * normal(rng);
  }

  inst.covariates = sample_covariates(checked, inst.truth, std::sqrt(checked.mu / nd), seed);
  return inst;
}

}  // namespace csbm
