#pragma once

#include "byzsim/types.hpp"

#include <cstdint>
#include <vector>

namespace byzsim {

/// Purpose tag of a randomness lane. Each concern draws from its own lane so
/// that changing one component (say, the compressor) never perturbs the draws
/// of another (say, client sampling) under the same seed.
enum class Purpose : std::uint64_t {
  Gate = 1,        // round-type Bernoulli gate
  Cohort = 2,      // client subset sampling
  Minibatch = 3,   // per-client minibatch indices
  Compressor = 4,  // per-client compression draws
  Bucketing = 5,   // server-side bucketing permutation
  Attack = 6,      // adversarial randomness (reserved)
  DataGen = 7,     // synthetic dataset generation
  Init = 8,        // estimator initialisation
  Probe = 9,       // test probes / Monte-Carlo drivers
};

/// Lane slot used for draws owned by the server rather than a client.
inline constexpr std::int64_t kServerLane = -1;

/// One randomness lane: a counter-based generator keyed by
/// (seed, round, client-or-server, purpose). Draw i is a pure function of the
/// key and i, so lanes can be re-created and replayed at will.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t round, std::int64_t client, Purpose purpose);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();

  /// Uniform double in (0, 1].
  double uniform_positive();

  /// Unbiased uniform integer in [0, n). Requires n >= 1.
  std::uint64_t uniform_below(std::uint64_t n);

  bool bernoulli(double p);

  /// Standard Gaussian via Box-Muller (pair cached).
  double normal();

  Vector gaussian_vector(Index d);

  /// Uniform k-subset of {0,...,n-1} via partial Fisher-Yates, returned sorted.
  std::vector<Index> sample_without_replacement(Index n, Index k);

  /// Uniform permutation of {0,...,n-1}.
  std::vector<Index> permutation(Index n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

/// Root seed holder; mints lanes.
class RngRoot {
 public:
  explicit RngRoot(std::uint64_t seed) : seed_(seed) {}

  RngStream lane(std::uint64_t round, std::int64_t client, Purpose purpose) const {
    return RngStream(seed_, round, client, purpose);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace byzsim
