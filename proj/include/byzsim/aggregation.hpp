#pragma once

#include "byzsim/rng.hpp"
#include "byzsim/sampling.hpp"
#include "byzsim/types.hpp"

#include <functional>
#include <vector>

namespace byzsim {

enum class AggregationRule { Mean, CoordinateMedian, GeometricMedian, Krum, TrimmedMean };

struct AggregatorSpec {
  AggregationRule rule = AggregationRule::Mean;
  Index bucket_size = 1;  // s; > 1 pre-averages permuted inputs in groups of s

  // Weiszfeld controls for the geometric median.
  Index gm_max_iters = 100;
  double gm_tol = 1e-10;
  double gm_smoothing = 1e-12;

  // Krum tolerates this many Byzantine inputs; -1 derives ceil(delta * m)
  // from the inputs it actually receives (post-bucketing).
  Index krum_assumed_byzantine = -1;
  Rational delta = 0;

  double trim_fraction = 0.1;  // per-side fraction dropped by the trimmed mean

  void validate() const;
};

/// Applies the configured rule, preceded by bucketing when bucket_size > 1.
/// The rng lane is consumed only by the bucketing permutation.
Vector aggregate(const AggregatorSpec& spec, const std::vector<Vector>& inputs,
                 RngStream& rng);

/// Means over groups of s of a uniformly permuted copy of the inputs; the last
/// bucket may be smaller. s = 1 yields a permutation of the inputs.
std::vector<Vector> bucketing(const std::vector<Vector>& inputs, Index s, RngStream& rng);

struct AggregatorBoundInfo {
  double f_a;  // ||Agg(inputs)|| <= f_a * max_i ||x_i||
};

AggregatorBoundInfo f_a_constant(const AggregatorSpec& spec, Index dimension);

/// Generator contract for the robustness check: fills the inputs of one trial
/// and marks which of them are good.
using RaggGenerator =
    std::function<void(Index trial, std::vector<Vector>& inputs, std::vector<bool>& good)>;

struct RaggReport {
  double mean_error_sq = 0.0;   // E ||agg - mean(good)||^2
  double mean_sigma_sq = 0.0;   // E of the pairwise variance over good inputs
  double delta_real = 0.0;      // Byzantine fraction of the generated inputs
  double implied_c = 0.0;       // mean_error_sq / (delta * mean_sigma_sq)
  bool degenerate = false;      // sigma^2 == 0 while Byzantine inputs are present
  Index trials = 0;
};

/// Monte-Carlo estimate of the aggregation error relative to delta sigma^2.
RaggReport empirical_ragg_check(const AggregatorSpec& spec, const RaggGenerator& generator,
                                Index trials, std::uint64_t seed);

}  // namespace byzsim
