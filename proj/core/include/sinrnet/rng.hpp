// Deterministic per-node random streams.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "sinrnet/model.hpp"

namespace sinrnet {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream seed for one node: a hash of the root seed and the node id, so a
/// node's choices do not depend on which other nodes exist or wake first.
inline std::uint64_t node_stream_seed(std::uint64_t root, NodeId id) {
  return splitmix64(splitmix64(root) ^ splitmix64(static_cast<std::uint64_t>(id) + 0x5bd1e995ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform double in (0, 1], 53 random bits.
  double uniform_open0() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform_open0() <= p); }

  /// Number of failures before the first success of independent Bernoulli(p)
  /// trials. kNever when p == 0.
  Slot geometric_failures(double p) {
    if (p >= 1.0) return 0;
    if (p <= 0.0) return kNever;
    const double k = std::floor(std::log(uniform_open0()) / std::log1p(-p));
    if (!(k < 4.0e18)) return kNever;
    return static_cast<Slot>(k);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sinrnet
