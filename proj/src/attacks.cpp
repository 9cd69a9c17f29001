#include "byzsim/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace byzsim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("byzantine_message: missing ") + what);
}

}  // namespace

Vector byzantine_message(const AttackSpec& spec, const AttackContext& ctx) {
  switch (spec.kind) {
    case AttackKind::None:
    case AttackKind::LabelFlipping:
      // Protocol-conformant senders; label poisoning happened at setup.
      require(ctx.honest_message != nullptr, "honest message");
      return *ctx.honest_message;
    case AttackKind::BitFlipping:
      require(ctx.honest_message != nullptr, "honest message");
      return -*ctx.honest_message;
    case AttackKind::Alie: {
      require(ctx.good_messages != nullptr, "good messages");
      if (spec.alie_z < 0.0) throw std::invalid_argument("byzantine_message: ALIE z >= 0");
      const auto& msgs = *ctx.good_messages;
      if (msgs.empty()) {
        // No good client sampled: no statistics to mimic.
        require(ctx.honest_message != nullptr, "honest message");
        return Vector::Zero(ctx.honest_message->size());
      }
      const Index d = msgs.front().size();
      Vector mean = Vector::Zero(d);
      for (const auto& v : msgs) mean += v;
      mean /= static_cast<double>(msgs.size());
      Vector var = Vector::Zero(d);
      for (const auto& v : msgs) var += (v - mean).cwiseAbs2();
      var /= static_cast<double>(msgs.size());  // population variance
      return mean + spec.alie_z * var.cwiseSqrt();
    }
    case AttackKind::ShiftBack: {
      if (!ctx.byz_majority) {
        require(ctx.honest_message != nullptr, "honest message");
        return *ctx.honest_message;
      }
      require(ctx.x_start != nullptr, "start iterate");
      require(ctx.x_current != nullptr, "current iterate");
      require(ctx.gamma > 0.0, "stepsize");
      // The server applies x_next = x_current - gamma (g_base + Agg(messages)),
      // so a captured aggregate of this payload lands the method on x^0.
      Vector payload = (*ctx.x_current - *ctx.x_start) / ctx.gamma;
      if (ctx.g_base != nullptr) payload -= *ctx.g_base;
      return payload;
    }
  }
  throw std::logic_error("byzantine_message: unreachable");
}

bool is_majority_counts(Index good_sampled, Index cohort_size, const Rational& delta) {
  if (cohort_size < 1) throw std::invalid_argument("is_majority: empty cohort");
  return good_sampled < majority_threshold(cohort_size, delta);
}

bool is_majority(const std::vector<Index>& sampled, const std::vector<Index>& good_set,
                 const Rational& delta) {
  Index good_sampled = 0;
  for (const Index i : sampled)
    if (std::binary_search(good_set.begin(), good_set.end(), i)) ++good_sampled;
  return is_majority_counts(good_sampled, static_cast<Index>(sampled.size()), delta);
}

}  // namespace byzsim
