#pragma once

#include "byzsim/rng.hpp"
#include "byzsim/types.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace byzsim {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact rational from a decimal string such as "0.25" or "1/4". Cohort
/// thresholds like ceil((1-delta) C) flip across integers when delta passes
/// through binary floating point, so delta is carried exactly end to end.
Rational rational_from_string(const std::string& text);

double to_double(const Rational& r);

/// Smallest integer t with t >= (1 - delta) * c.
Index majority_threshold(Index c, const Rational& delta);

BigInt binomial(Index n, Index k);

/// Round-type gating and cohort sizes for client sampling.
struct ParticipationConfig {
  Index n = 0;               // total clients
  Index good_count = 0;      // |G|
  Index cohort = 0;          // C, sampled when the gate is 0
  Index refresh_cohort = 0;  // C-hat, sampled when the gate is 1
  double p = 1.0;            // gate probability
  Rational delta = 0;        // known Byzantine bound, delta_real <= delta < 1/2

  Index byzantine_count() const { return n - good_count; }
  void validate() const;
};

/// One round's randomness outcome.
struct RoundPlan {
  int gate = 0;                                  // c_k
  std::vector<Index> cohort;                     // S_k, sorted client ids
  std::vector<std::vector<Index>> minibatches;   // parallel to cohort; empty when gate = 1
};

/// Draws the gate bit, the uniform cohort of the required size, and (for
/// estimator rounds) a with-replacement minibatch of the given size per
/// sampled client, all from the round's lanes.
RoundPlan sample_round(const ParticipationConfig& cfg, Index minibatch_size,
                       const std::vector<Index>& client_sample_counts, Index round,
                       const RngRoot& rng);

/// P{G_C >= (1-delta) C} under uniform sampling of C of n clients with G good:
/// sum over t >= ceil((1-delta)C) of C(G,t) C(n-G,C-t) / C(n,C).
Rational prob_good_majority(Index n, Index g, Index c, const Rational& delta);

/// P{i in G_C | G_C >= (1-delta) C} for a fixed good client i:
/// (C / (n p_G)) sum over the same range of C(G-1,t-1) C(n-G,C-t) / C(n-1,C-1).
/// Requires g >= 1 and p_G > 0.
Rational prob_in_good_sample(Index n, Index g, Index c, const Rational& delta);

}  // namespace byzsim
