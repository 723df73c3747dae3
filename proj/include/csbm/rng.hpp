#pragma once

#include <cstdint>
#include <limits>

namespace csbm {

// Stream identifiers. Every random quantity in the library draws from
// Rng(seed, stream) with one of these ids, so that e.g. resampling the graph
// never shifts the covariate noise.
//
//   kLabels           v (community labels)
//   kLatent           u (covariate direction)
//   kGraph            edge sampling (geometric skips)
//   kCovariateNoise   Z in B = signal + Z/sqrt(p)
//   kGaussianNoise    W in the Gaussian observation A
//   kMessageInit      random initialization of message-passing iterates
//   kEigenStart       Lanczos start vector
//   kPoolInit         density-evolution initial pool
//   kPoolStep + t     density-evolution step t
//   kAscent + r       restart r of projected gradient ascent (tests)
namespace stream {
inline constexpr std::uint64_t kLabels = 1;
inline constexpr std::uint64_t kLatent = 2;
inline constexpr std::uint64_t kGraph = 3;
inline constexpr std::uint64_t kCovariateNoise = 4;
inline constexpr std::uint64_t kGaussianNoise = 5;
inline constexpr std::uint64_t kMessageInit = 6;
inline constexpr std::uint64_t kEigenStart = 7;
inline constexpr std::uint64_t kPoolInit = 8;
inline constexpr std::uint64_t kPoolStep = 1u << 20;
inline constexpr std::uint64_t kAscent = 1u << 24;
}  // namespace stream

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives a child seed from a parent seed and two indices (used for
/// per-cell/per-run seeds in sweeps).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(seed) ^ (a * 0xD1B54A32D192ED03ull)) ^ (b * 0x8CB92BA72F3D8DD7ull));
}

/// Counter-based generator keyed by (seed, stream). The k-th output is a
/// pure function of (seed, stream, k), which makes streams independent of
/// one another and of the order in which they are consumed.
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random>
/// distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t stream)
      : seed_key_(mix64(seed ^ 0x243F6A8885A308D3ull)),
        stream_key_(mix64(stream + 0x13198A2E03707344ull)) {}

  result_type operator()() { return mix64(mix64(counter_++ ^ stream_key_) + seed_key_); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_key_;
  std::uint64_t stream_key_;
  std::uint64_t counter_ = 0;
};

}  // namespace csbm
