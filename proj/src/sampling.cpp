#include "byzsim/sampling.hpp"

#include <cctype>
#include <stdexcept>

namespace byzsim {

Rational rational_from_string(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("rational_from_string: empty");
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    pos = 1;
  }
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const BigInt num(text.substr(pos, slash - pos));
    const BigInt den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational_from_string: zero denominator");
    Rational r(num, den);
    return negative ? -r : r;
  }
  BigInt num = 0;
  BigInt den = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (ch == '.') {
      if (seen_dot) throw std::invalid_argument("rational_from_string: bad number");
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw std::invalid_argument("rational_from_string: bad character in '" + text + "'");
    seen_digit = true;
    num = num * 10 + (ch - '0');
    if (seen_dot) den *= 10;
  }
  if (!seen_digit) throw std::invalid_argument("rational_from_string: no digits");
  Rational r(num, den);
  return negative ? -r : r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Index majority_threshold(Index c, const Rational& delta) {
  // ceil((1 - delta) c) computed with integer arithmetic.
  const Rational target = (Rational(1) - delta) * c;
  const BigInt num = boost::multiprecision::numerator(target);
  const BigInt den = boost::multiprecision::denominator(target);
  BigInt q = num / den;
  if (q * den < num) q += 1;
  return q.convert_to<Index>();
}

BigInt binomial(Index n, Index k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt out = 1;
  for (Index i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;
  }
  return out;
}

void ParticipationConfig::validate() const {
  if (n < 1) throw std::invalid_argument("ParticipationConfig: n must be positive");
  if (good_count < 0 || good_count > n)
    throw std::invalid_argument("ParticipationConfig: bad good count");
  if (cohort < 1 || cohort > refresh_cohort || refresh_cohort > n)
    throw std::invalid_argument("ParticipationConfig: need 1 <= C <= C-hat <= n");
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("ParticipationConfig: p must lie in (0, 1]");
  const Index b = byzantine_count();
  const Rational delta_real(b, n);
  if (delta < delta_real || delta >= Rational(1, 2))
    throw std::invalid_argument("ParticipationConfig: need delta_real <= delta < 1/2");
  if (b > 0) {
    // C-hat >= delta_real n / delta keeps Byzantines a minority in refresh rounds.
    const Rational bound = Rational(b) / delta;
    if (Rational(refresh_cohort) < bound)
      throw std::invalid_argument("ParticipationConfig: refresh cohort below B/delta");
  }
}

RoundPlan sample_round(const ParticipationConfig& cfg, Index minibatch_size,
                       const std::vector<Index>& client_sample_counts, Index round,
                       const RngRoot& rng) {
  cfg.validate();
  if (static_cast<Index>(client_sample_counts.size()) != cfg.n)
    throw std::invalid_argument("sample_round: sample counts must cover all clients");
  RoundPlan plan;
  const auto r = static_cast<std::uint64_t>(round);
  auto gate_lane = rng.lane(r, kServerLane, Purpose::Gate);
  plan.gate = gate_lane.bernoulli(cfg.p) ? 1 : 0;
  auto cohort_lane = rng.lane(r, kServerLane, Purpose::Cohort);
  const Index size = plan.gate == 1 ? cfg.refresh_cohort : cfg.cohort;
  plan.cohort = cohort_lane.sample_without_replacement(cfg.n, size);
  if (plan.gate == 0) {
    if (minibatch_size < 1) throw std::invalid_argument("sample_round: minibatch size >= 1");
    plan.minibatches.reserve(plan.cohort.size());
    for (const Index client : plan.cohort) {
      const Index m = client_sample_counts[static_cast<std::size_t>(client)];
      if (m < 1) throw std::invalid_argument("sample_round: client has no samples");
      auto batch_lane = rng.lane(r, client, Purpose::Minibatch);
      std::vector<Index> batch(static_cast<std::size_t>(minibatch_size));
      for (auto& idx : batch)
        idx = static_cast<Index>(batch_lane.uniform_below(static_cast<std::uint64_t>(m)));
      plan.minibatches.push_back(std::move(batch));
    }
  }
  return plan;
}

namespace {

void check_prob_args(Index n, Index g, Index c, const Rational& delta) {
  if (n < 1 || g < 0 || g > n) throw std::invalid_argument("probability: bad n or G");
  if (c < 1 || c > n) throw std::invalid_argument("probability: bad C");
  if (delta < 0 || delta >= Rational(1, 2))
    throw std::invalid_argument("probability: delta must lie in [0, 1/2)");
}

}  // namespace

Rational prob_good_majority(Index n, Index g, Index c, const Rational& delta) {
  check_prob_args(n, g, c, delta);
  const Index t0 = majority_threshold(c, delta);
  BigInt favourable = 0;
  for (Index t = t0; t <= c; ++t) favourable += binomial(g, t) * binomial(n - g, c - t);
  return Rational(favourable, binomial(n, c));
}

Rational prob_in_good_sample(Index n, Index g, Index c, const Rational& delta) {
  check_prob_args(n, g, c, delta);
  if (g < 1) throw std::invalid_argument("prob_in_good_sample: needs at least one good client");
  const Rational p_g = prob_good_majority(n, g, c, delta);
  if (p_g == 0)
    throw std::domain_error("prob_in_good_sample: conditioning event has probability zero");
  const Index t0 = majority_threshold(c, delta);
  BigInt favourable = 0;
  for (Index t = t0; t <= c; ++t)
    favourable += binomial(g - 1, t - 1) * binomial(n - g, c - t);
  Rational sum(favourable, binomial(n - 1, c - 1));
  return Rational(c, n) * sum / p_g;
}

}  // namespace byzsim
