#pragma once

#include "byzsim/aggregation.hpp"
#include "byzsim/attacks.hpp"
#include "byzsim/compression.hpp"
#include "byzsim/metrics.hpp"
#include "byzsim/sampling.hpp"
#include "byzsim/types.hpp"
#include "byzsim/world.hpp"

#include <utility>
#include <vector>

namespace byzsim {

/// Round state of the variance-reduced method.
struct AlgoState {
  Vector x;       // x^k
  Vector g;       // g^k
  Vector x_prev;  // x^{k-1}, feeds the clip level
  Index k = 0;
};

/// Lane discipline (shared with the initialisation and any external replayer):
/// algorithm round k draws from lane round k + 1; lane round 0 is reserved for
/// the forced estimator-initialisation round. Within a lane round the server
/// uses Gate, Cohort and Bucketing lanes; client i uses its Minibatch and
/// Compressor lanes.
struct MarinaPpConfig {
  double gamma = 0.0;      // stepsize
  Index minibatch = 1;     // b
  double p = 1.0;          // refresh-round probability
  double alpha = kInfinity;  // clip multiplier; lambda = alpha ||x^{k+1} - x^k||
  Index cohort = 0;          // C
  Index refresh_cohort = 0;  // C-hat
  Index rounds = 0;          // K
  double epoch_budget = kInfinity;  // stop once cumulative epochs reach this
  AggregatorSpec aggregator;
  CompressorSpec compressor;
  Rational delta = 0;
  Vector x0;  // empty: zero start

  ParticipationConfig participation(Index n, Index good) const;
  void validate(const WorldSpec& world) const;
};

struct RoundOutcome {
  int gate = 0;
  Index good_sampled = 0;
  Index byz_sampled = 0;
  Index clip_activations = 0;
  Index coords_sent = 0;
  Index good_component_evals = 0;
};

/// One full round: iterate step, round plan, client messages (honest pipeline
/// for good clients, attack payloads for Byzantine ones), server-side clipping
/// of every received estimator-round message, robust aggregation, estimator
/// update.
std::pair<AlgoState, RoundOutcome> marina_pp_round(const AlgoState& state,
                                                   const MarinaPpConfig& cfg,
                                                   const WorldSpec& world, const RngRoot& rng);

/// Forced refresh round at x^0 (lane round 0): the robust aggregate of full
/// gradients from a refresh cohort initialises g^0.
std::pair<AlgoState, RoundOutcome> init_marina_state(const MarinaPpConfig& cfg,
                                                     const WorldSpec& world, const RngRoot& rng);

/// K rounds from the given seed. Row k of the result describes iterate x^k;
/// row 0 carries the initialisation round. K = 0 returns an empty trajectory.
std::vector<RoundMetrics> run_marina_pp(const MarinaPpConfig& cfg, const WorldSpec& world,
                                        std::uint64_t seed, double f_star);

/// Clipped-difference wrapper around client-momentum SGD.
struct MomentumHeuristicConfig {
  double gamma = 0.0;
  double beta = 0.9;         // momentum coefficient in [0, 1)
  double alpha = kInfinity;  // clip multiplier
  Index cohort = 0;          // C
  Index minibatch = 1;       // b, worker gradient estimator batch
  Index rounds = 0;
  double epoch_budget = kInfinity;
  AggregatorSpec aggregator;
  Rational delta = 0;
  Vector x0;

  void validate(const WorldSpec& world) const;
};

struct MomentumState {
  Vector x;
  Vector x_prev;
  Vector g;                     // g^{k-1}
  std::vector<Vector> momenta;  // per-client buffers, updated when sampled
  Index k = 0;
};

/// One heuristic round: sampled clients send momentum buffers, the server
/// clips their differences to g^{k-1} at lambda_k = alpha ||x^k - x^{k-1}||,
/// aggregates, and steps. Round 0 runs unclipped (no displacement exists yet).
std::pair<MomentumState, RoundOutcome> momentum_heuristic_round(
    const MomentumState& state, const MomentumHeuristicConfig& cfg, const WorldSpec& world,
    const RngRoot& rng);

std::vector<RoundMetrics> run_momentum_heuristic(const MomentumHeuristicConfig& cfg,
                                                 const WorldSpec& world, std::uint64_t seed,
                                                 double f_star);

enum class TheoremVariant { GeneralCompressor, BoundedCompressor };

struct TheoryInputs {
  double l = 0.0;        // smoothness constant
  double omega = 0.0;    // compressor variance factor
  double c = 1.0;        // robust-aggregator constant
  double delta = 0.0;    // Byzantine bound
  double p = 1.0;        // refresh probability
  double p_g = 1.0;      // P{good majority in an estimator cohort}
  double p_in_c = 1.0;   // P{i in cohort | good majority}, cohort size C
  double p_in_chat = 1.0;  // same for the refresh cohort
  double good_count = 0.0;   // G
  double cohort = 0.0;       // C
  double refresh_cohort = 0.0;  // C-hat
  double f_a = 1.0;
  double d_q = 1.0;
  double zeta = 0.0;
  double mu = 0.0;
};

struct TheoryConstants {
  double a = 0.0;
  double d_hat = 0.0;
  double gamma_max = 0.0;     // 1 / (L (1 + sqrt(A)))
  double gamma_max_pl = 0.0;  // 1 / (L (1 + sqrt(2A)))
  double rho = 0.0;           // min{gamma_pl mu, p/8} or min{gamma_pl mu, p/4}
};

TheoryConstants theorem_constants(TheoremVariant variant, const TheoryInputs& in);

}  // namespace byzsim
