#pragma once

#include "byzsim/problem.hpp"
#include "byzsim/sampling.hpp"
#include "byzsim/types.hpp"

#include <memory>
#include <vector>

namespace byzsim {

enum class AttackKind { None, BitFlipping, LabelFlipping, Alie, ShiftBack };

struct AttackSpec {
  AttackKind kind = AttackKind::None;
  double alie_z = 1.0;  // Byzantine offset in good-message standard deviations
};

/// Full description of the federation: per-client objectives (label-flipped
/// copies for poisoned Byzantine slots), the good set, the attack, and the
/// known Byzantine bound delta.
struct WorldSpec {
  ClientAssignment assignment;
  std::vector<std::shared_ptr<const Objective>> objectives;  // one per client
  AttackSpec attack;
  Rational delta = 0;

  Index client_count() const { return assignment.client_count(); }
  Index good_count() const { return assignment.good_count(); }
  bool is_good(Index client) const { return assignment.is_good(client); }
  Index dimension() const { return objectives.front()->dimension(); }
  std::vector<Index> sample_counts() const;

  /// Exact oracles over the good clients' mean objective (simulator
  /// privilege; never fed back into the algorithm).
  double global_value(const Vector& x) const;
  Vector global_gradient(const Vector& x) const;
  SmoothnessInfo global_smoothness() const;
  double global_pl_lower_bound() const;
};

/// Builds the logistic-regression federation. Label-flipping Byzantines get a
/// poisoned copy (y -> 1 - y) of their shard at setup time.
WorldSpec make_logistic_world(const ClientAssignment& assignment, double eta,
                              const AttackSpec& attack, const Rational& delta);

/// Homogeneous quadratic federation: every client holds the same objective.
WorldSpec make_quadratic_world(const Matrix& a, const Vector& b, Index n, Index byzantine,
                               const AttackSpec& attack, const Rational& delta);

/// Mean objective over the good clients, usable with the reference solver.
class FederatedObjective final : public Objective {
 public:
  explicit FederatedObjective(const WorldSpec& world) : world_(&world) {}

  Index dimension() const override { return world_->dimension(); }
  Index sample_count() const override { return 1; }
  double value(const Vector& x) const override { return world_->global_value(x); }
  Vector gradient(const Vector& x) const override { return world_->global_gradient(x); }
  Vector sample_gradient(const Vector& x, Index) const override {
    return world_->global_gradient(x);
  }
  SmoothnessInfo smoothness() const override { return world_->global_smoothness(); }
  double pl_lower_bound() const override { return world_->global_pl_lower_bound(); }

 private:
  const WorldSpec* world_;
};

}  // namespace byzsim
