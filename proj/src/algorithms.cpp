#include "byzsim/algorithms.hpp"

#include "byzsim/numerics.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace byzsim {

namespace {

Index nonzero_count(const Vector& v) {
  Index out = 0;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) ++out;
  return out;
}

Vector starting_point(const Vector& configured, Index dimension) {
  if (configured.size() == 0) return Vector::Zero(dimension);
  if (configured.size() != dimension)
    throw std::invalid_argument("starting point has wrong dimension");
  return configured;
}

double epoch_denominator(const WorldSpec& world) {
  double total = 0.0;
  for (const auto& obj : world.objectives) total += static_cast<double>(obj->sample_count());
  return total;
}

/// Shared message stage: honest pipeline output per sampled client, then
/// attack payloads substituted for Byzantine slots. Messages are ordered by
/// cohort position (ascending client id).
struct MessageStage {
  std::vector<Vector> messages;
  Index good_sampled = 0;
  Index coords_sent = 0;
};

MessageStage collect_messages(const WorldSpec& world, const std::vector<Index>& cohort,
                              const std::vector<Vector>& honest, const AttackContext& base) {
  MessageStage stage;
  std::vector<Vector> good_messages;
  for (std::size_t idx = 0; idx < cohort.size(); ++idx) {
    if (world.is_good(cohort[idx])) {
      ++stage.good_sampled;
      good_messages.push_back(honest[idx]);
    }
  }
  stage.messages.reserve(cohort.size());
  for (std::size_t idx = 0; idx < cohort.size(); ++idx) {
    const Index client = cohort[idx];
    if (world.is_good(client)) {
      stage.messages.push_back(honest[idx]);
    } else {
      AttackContext ctx = base;
      ctx.good_messages = &good_messages;
      ctx.honest_message = &honest[idx];
      stage.messages.push_back(byzantine_message(world.attack, ctx));
    }
    ensure_finite(stage.messages.back(), "client message");
    stage.coords_sent += nonzero_count(stage.messages.back());
  }
  return stage;
}

}  // namespace

ParticipationConfig MarinaPpConfig::participation(Index n, Index good) const {
  ParticipationConfig out;
  out.n = n;
  out.good_count = good;
  out.cohort = cohort;
  out.refresh_cohort = refresh_cohort;
  out.p = p;
  out.delta = delta;
  return out;
}

void MarinaPpConfig::validate(const WorldSpec& world) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("MarinaPpConfig: gamma must be positive");
  if (minibatch < 1) throw std::invalid_argument("MarinaPpConfig: minibatch >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("MarinaPpConfig: alpha must be positive");
  if (rounds < 0) throw std::invalid_argument("MarinaPpConfig: rounds >= 0");
  participation(world.client_count(), world.good_count()).validate();
  aggregator.validate();
  CompressorSpec comp = compressor;
  if (comp.dimension == 0) comp.dimension = world.dimension();
  comp.validate();
  if (comp.dimension != world.dimension())
    throw std::invalid_argument("MarinaPpConfig: compressor dimension mismatch");
}

std::pair<AlgoState, RoundOutcome> init_marina_state(const MarinaPpConfig& cfg,
                                                     const WorldSpec& world,
                                                     const RngRoot& rng) {
  cfg.validate(world);
  const Index n = world.client_count();
  const Vector x0 = starting_point(cfg.x0, world.dimension());

  auto cohort_lane = rng.lane(0, kServerLane, Purpose::Cohort);
  const auto cohort = cohort_lane.sample_without_replacement(n, cfg.refresh_cohort);

  std::vector<Vector> honest;
  honest.reserve(cohort.size());
  for (const Index client : cohort)
    honest.push_back(world.objectives[static_cast<std::size_t>(client)]->gradient(x0));

  Index good_in_cohort = 0;
  for (const Index client : cohort)
    if (world.is_good(client)) ++good_in_cohort;

  AttackContext ctx;
  ctx.round = -1;
  ctx.x_start = &x0;
  ctx.x_current = &x0;
  ctx.g_base = nullptr;
  ctx.gamma = cfg.gamma;
  ctx.byz_majority =
      is_majority_counts(good_in_cohort, static_cast<Index>(cohort.size()), world.delta);
  ctx.round_kind = 1;
  auto stage = collect_messages(world, cohort, honest, ctx);

  auto bucket_lane = rng.lane(0, kServerLane, Purpose::Bucketing);
  AlgoState state;
  state.x = x0;
  state.g = aggregate(cfg.aggregator, stage.messages, bucket_lane);
  state.x_prev = x0;
  state.k = 0;

  RoundOutcome outcome;
  outcome.gate = 1;
  outcome.good_sampled = stage.good_sampled;
  outcome.byz_sampled = static_cast<Index>(cohort.size()) - stage.good_sampled;
  outcome.coords_sent = stage.coords_sent;
  for (const Index client : cohort)
    if (world.is_good(client))
      outcome.good_component_evals +=
          world.objectives[static_cast<std::size_t>(client)]->sample_count();
  return {std::move(state), outcome};
}

std::pair<AlgoState, RoundOutcome> marina_pp_round(const AlgoState& state,
                                                   const MarinaPpConfig& cfg,
                                                   const WorldSpec& world, const RngRoot& rng) {
  const Index n = world.client_count();
  const auto lane_round = static_cast<Index>(state.k + 1);

  AlgoState next;
  next.x = state.x - cfg.gamma * state.g;
  next.x_prev = state.x;
  next.k = state.k + 1;
  ensure_finite(next.x, "iterate");

  const ClipLevel level = std::isfinite(cfg.alpha)
                              ? ClipLevel(cfg.alpha * (next.x - state.x).norm())
                              : ClipLevel::none();

  const auto plan = sample_round(cfg.participation(n, world.good_count()), cfg.minibatch,
                                 world.sample_counts(), lane_round, rng);

  CompressorSpec comp = cfg.compressor;
  if (comp.dimension == 0) comp.dimension = world.dimension();

  std::vector<Vector> honest;
  honest.reserve(plan.cohort.size());
  RoundOutcome outcome;
  outcome.gate = plan.gate;
  for (std::size_t idx = 0; idx < plan.cohort.size(); ++idx) {
    const Index client = plan.cohort[idx];
    const auto& obj = *world.objectives[static_cast<std::size_t>(client)];
    if (plan.gate == 1) {
      honest.push_back(obj.gradient(next.x));
      if (world.is_good(client)) outcome.good_component_evals += obj.sample_count();
    } else {
      const Vector delta_hat = minibatch_delta(obj, plan.minibatches[idx], next.x, state.x);
      auto comp_lane = rng.lane(static_cast<std::uint64_t>(lane_round), client,
                                Purpose::Compressor);
      honest.push_back(compress(comp, delta_hat, comp_lane));
      if (world.is_good(client)) outcome.good_component_evals += 2 * cfg.minibatch;
    }
  }

  Index good_in_cohort = 0;
  for (const Index client : plan.cohort)
    if (world.is_good(client)) ++good_in_cohort;

  AttackContext ctx;
  ctx.round = state.k;
  ctx.x_start = &cfg.x0;
  Vector default_start;
  if (cfg.x0.size() == 0) {
    default_start = Vector::Zero(world.dimension());
    ctx.x_start = &default_start;
  }
  ctx.x_current = &next.x;
  ctx.g_base = plan.gate == 1 ? nullptr : &state.g;
  ctx.gamma = cfg.gamma;
  ctx.byz_majority =
      is_majority_counts(good_in_cohort, static_cast<Index>(plan.cohort.size()), world.delta);
  ctx.round_kind = plan.gate;
  auto stage = collect_messages(world, plan.cohort, honest, ctx);
  outcome.good_sampled = stage.good_sampled;
  outcome.byz_sampled = static_cast<Index>(plan.cohort.size()) - stage.good_sampled;
  outcome.coords_sent = stage.coords_sent;

  auto bucket_lane = rng.lane(static_cast<std::uint64_t>(lane_round), kServerLane,
                              Purpose::Bucketing);
  if (plan.gate == 1) {
    next.g = aggregate(cfg.aggregator, stage.messages, bucket_lane);
  } else {
    std::vector<Vector> clipped;
    clipped.reserve(stage.messages.size());
    for (const auto& msg : stage.messages) {
      if (level.enabled() && msg.norm() > level.lambda) ++outcome.clip_activations;
      clipped.push_back(clip(msg, level));
    }
    const Vector update = aggregate(cfg.aggregator, clipped, bucket_lane);
    if (level.enabled()) {
      const double bound = f_a_constant(cfg.aggregator, world.dimension()).f_a * level.lambda;
      if (update.norm() > bound * (1.0 + 1e-9))
        throw std::logic_error("marina_pp_round: aggregate escaped the clip bound");
    }
    next.g = state.g + update;
  }
  ensure_finite(next.g, "estimator");
  return {std::move(next), outcome};
}

namespace {

RoundMetrics make_row(Index k, const WorldSpec& world, const Vector& x, double f_star,
                      const RoundOutcome& outcome, double epochs,
                      std::int64_t wall_ns) {
  RoundMetrics row;
  row.k = k;
  row.f_gap = world.global_value(x) - f_star;
  row.grad_sq = world.global_gradient(x).squaredNorm();
  row.c_k = outcome.gate;
  row.good_sampled = outcome.good_sampled;
  row.byz_sampled = outcome.byz_sampled;
  row.clip_activations = outcome.clip_activations;
  row.coords_sent = outcome.coords_sent;
  row.epochs = epochs;
  row.wall_ns = wall_ns;
  return row;
}

}  // namespace

std::vector<RoundMetrics> run_marina_pp(const MarinaPpConfig& cfg, const WorldSpec& world,
                                        std::uint64_t seed, double f_star) {
  if (cfg.rounds == 0) return {};
  using Clock = std::chrono::steady_clock;
  const RngRoot root(seed);
  const double denom = epoch_denominator(world);

  auto t0 = Clock::now();
  auto [state, init_outcome] = init_marina_state(cfg, world, root);
  double evals = static_cast<double>(init_outcome.good_component_evals);
  std::vector<RoundMetrics> rows;
  rows.reserve(static_cast<std::size_t>(cfg.rounds) + 1);
  rows.push_back(make_row(0, world, state.x, f_star, init_outcome, evals / denom,
                          std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0)
                              .count()));

  for (Index k = 0; k < cfg.rounds && evals / denom < cfg.epoch_budget; ++k) {
    auto t1 = Clock::now();
    auto [next, outcome] = marina_pp_round(state, cfg, world, root);
    state = std::move(next);
    evals += static_cast<double>(outcome.good_component_evals);
    rows.push_back(make_row(
        state.k, world, state.x, f_star, outcome, evals / denom,
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t1).count()));
  }
  return rows;
}

void MomentumHeuristicConfig::validate(const WorldSpec& world) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("MomentumHeuristicConfig: gamma > 0");
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("MomentumHeuristicConfig: beta in [0, 1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("MomentumHeuristicConfig: alpha > 0");
  if (cohort < 1 || cohort > world.client_count())
    throw std::invalid_argument("MomentumHeuristicConfig: bad cohort size");
  if (minibatch < 1) throw std::invalid_argument("MomentumHeuristicConfig: minibatch >= 1");
  aggregator.validate();
  const Rational delta_real(world.client_count() - world.good_count(), world.client_count());
  if (delta < delta_real || delta >= Rational(1, 2))
    throw std::invalid_argument("MomentumHeuristicConfig: need delta_real <= delta < 1/2");
}

std::pair<MomentumState, RoundOutcome> momentum_heuristic_round(
    const MomentumState& state, const MomentumHeuristicConfig& cfg, const WorldSpec& world,
    const RngRoot& rng) {
  const Index n = world.client_count();
  const auto lane_round = static_cast<std::uint64_t>(state.k + 1);

  auto cohort_lane = rng.lane(lane_round, kServerLane, Purpose::Cohort);
  const auto cohort = cohort_lane.sample_without_replacement(n, cfg.cohort);

  // Round 0 has no displacement to scale the clip level by; it runs unclipped.
  const ClipLevel level =
      (state.k == 0 || !std::isfinite(cfg.alpha))
          ? ClipLevel::none()
          : ClipLevel(cfg.alpha * (state.x - state.x_prev).norm());

  MomentumState next;
  next.x_prev = state.x;
  next.momenta = state.momenta;
  next.k = state.k + 1;

  std::vector<Vector> honest;
  honest.reserve(cohort.size());
  RoundOutcome outcome;
  outcome.gate = 0;
  for (const Index client : cohort) {
    const auto& obj = *world.objectives[static_cast<std::size_t>(client)];
    auto batch_lane = rng.lane(lane_round, client, Purpose::Minibatch);
    Vector ghat = Vector::Zero(world.dimension());
    for (Index t = 0; t < cfg.minibatch; ++t) {
      const auto j = static_cast<Index>(
          batch_lane.uniform_below(static_cast<std::uint64_t>(obj.sample_count())));
      ghat += obj.sample_gradient(state.x, j);
    }
    ghat /= static_cast<double>(cfg.minibatch);
    auto& buffer = next.momenta[static_cast<std::size_t>(client)];
    buffer = (1.0 - cfg.beta) * ghat + cfg.beta * buffer;
    honest.push_back(buffer);
    if (world.is_good(client)) outcome.good_component_evals += cfg.minibatch;
  }

  Index good_in_cohort = 0;
  for (const Index client : cohort)
    if (world.is_good(client)) ++good_in_cohort;

  AttackContext ctx;
  ctx.round = state.k;
  Vector default_start;
  ctx.x_start = &cfg.x0;
  if (cfg.x0.size() == 0) {
    default_start = Vector::Zero(world.dimension());
    ctx.x_start = &default_start;
  }
  ctx.x_current = &state.x;
  ctx.g_base = nullptr;  // the server subtracts g^{k-1} from the wire message itself
  ctx.gamma = cfg.gamma;
  ctx.byz_majority =
      is_majority_counts(good_in_cohort, static_cast<Index>(cohort.size()), world.delta);
  ctx.round_kind = 0;
  auto stage = collect_messages(world, cohort, honest, ctx);
  outcome.good_sampled = stage.good_sampled;
  outcome.byz_sampled = static_cast<Index>(cohort.size()) - stage.good_sampled;
  outcome.coords_sent = stage.coords_sent;

  std::vector<Vector> clipped;
  clipped.reserve(stage.messages.size());
  for (const auto& msg : stage.messages) {
    const Vector diff = msg - state.g;
    if (level.enabled() && diff.norm() > level.lambda) ++outcome.clip_activations;
    clipped.push_back(clip(diff, level));
  }
  auto bucket_lane = rng.lane(lane_round, kServerLane, Purpose::Bucketing);
  next.g = state.g + aggregate(cfg.aggregator, clipped, bucket_lane);
  next.x = state.x - cfg.gamma * next.g;
  ensure_finite(next.x, "iterate");
  ensure_finite(next.g, "estimator");
  return {std::move(next), outcome};
}

std::vector<RoundMetrics> run_momentum_heuristic(const MomentumHeuristicConfig& cfg,
                                                 const WorldSpec& world, std::uint64_t seed,
                                                 double f_star) {
  cfg.validate(world);
  if (cfg.rounds == 0) return {};
  using Clock = std::chrono::steady_clock;
  const RngRoot root(seed);
  const double denom = epoch_denominator(world);

  MomentumState state;
  state.x = starting_point(cfg.x0, world.dimension());
  state.x_prev = state.x;
  state.g = Vector::Zero(world.dimension());
  state.momenta.assign(static_cast<std::size_t>(world.client_count()),
                       Vector::Zero(world.dimension()));

  std::vector<RoundMetrics> rows;
  rows.reserve(static_cast<std::size_t>(cfg.rounds) + 1);
  rows.push_back(make_row(0, world, state.x, f_star, RoundOutcome{}, 0.0, 0));

  double evals = 0.0;
  for (Index k = 0; k < cfg.rounds && evals / denom < cfg.epoch_budget; ++k) {
    auto t1 = Clock::now();
    auto [next, outcome] = momentum_heuristic_round(state, cfg, world, root);
    state = std::move(next);
    evals += static_cast<double>(outcome.good_component_evals);
    rows.push_back(make_row(
        state.k, world, state.x, f_star, outcome, evals / denom,
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t1).count()));
  }
  return rows;
}

TheoryConstants theorem_constants(TheoremVariant variant, const TheoryInputs& in) {
  if (in.l <= 0.0) throw std::invalid_argument("theorem_constants: L must be positive");
  if (!(in.p > 0.0 && in.p <= 1.0))
    throw std::invalid_argument("theorem_constants: p must lie in (0, 1]");
  if (in.delta < 0.0 || in.delta >= 0.5)
    throw std::invalid_argument("theorem_constants: delta must lie in [0, 1/2)");

  TheoryConstants out;
  const double one_minus_delta = 1.0 - in.delta;
  if (variant == TheoremVariant::GeneralCompressor) {
    out.a = 32.0 * in.p_g * in.good_count * in.p_in_c /
                (in.p * in.p * one_minus_delta * in.cohort) * (30.0 * in.omega + 11.0) *
                (1.0 + 2.0 * in.c * in.delta) +
            16.0 * (1.0 - in.p_g) * (1.0 + 4.0 * in.f_a * in.f_a) / (in.p * in.p);
  } else {
    out.a = 4.0 * in.p_g * in.good_count * in.p_in_c / (in.p * one_minus_delta * in.cohort) *
                ((3.0 * in.omega + 2.0) / (one_minus_delta * in.cohort) +
                 8.0 * (5.0 * in.omega + 4.0) * in.c * in.delta / in.p) +
            8.0 * (1.0 - in.p_g) * (2.0 + in.f_a * in.f_a * in.d_q * in.d_q) / (in.p * in.p);
  }
  out.d_hat = 2.0 * in.delta * in.p_in_chat / one_minus_delta *
              (6.0 * in.c * in.good_count / in.refresh_cohort + in.p);
  out.gamma_max = 1.0 / (in.l * (1.0 + std::sqrt(out.a)));
  out.gamma_max_pl = 1.0 / (in.l * (1.0 + std::sqrt(2.0 * out.a)));
  const double cap = variant == TheoremVariant::GeneralCompressor ? in.p / 8.0 : in.p / 4.0;
  out.rho = std::min(out.gamma_max_pl * in.mu, cap);
  return out;
}

}  // namespace byzsim
