#pragma once

#include "byzsim/sampling.hpp"
#include "byzsim/types.hpp"
#include "byzsim/world.hpp"

#include <vector>

namespace byzsim {

/// Everything a colluding Byzantine worker can see in one round. Attacks are
/// read-only over this context; good clients' state is never touched.
struct AttackContext {
  Index round = 0;
  const Vector* x_start = nullptr;    // x^0
  const Vector* x_current = nullptr;  // iterate whose successor this round determines
  const Vector* g_base = nullptr;     // estimator the aggregate is added to; null when replaced
  double gamma = 0.0;
  bool byz_majority = false;
  int round_kind = 0;                 // c_k
  const std::vector<Vector>* good_messages = nullptr;  // honest vectors, same pipeline stage
  const Vector* honest_message = nullptr;              // what this worker would send if honest
};

/// Message a Byzantine worker transmits. Shift-back steers the next iterate
/// back to x^0 whenever the sampled round has a Byzantine majority and follows
/// protocol otherwise; bit flipping negates the honest message; label flipping
/// is protocol-conformant over its poisoned data; ALIE places the message at
/// mean + z * std of the good messages, per coordinate.
Vector byzantine_message(const AttackSpec& spec, const AttackContext& ctx);

/// True iff the sampled good count falls below ceil((1 - delta) |sampled|),
/// the event in which the aggregation can be spoiled.
bool is_majority(const std::vector<Index>& sampled, const std::vector<Index>& good_set,
                 const Rational& delta);
bool is_majority_counts(Index good_sampled, Index cohort_size, const Rational& delta);

}  // namespace byzsim
