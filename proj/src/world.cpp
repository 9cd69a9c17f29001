#include "byzsim/world.hpp"

#include "byzsim/numerics.hpp"

#include <numeric>
#include <stdexcept>

namespace byzsim {

std::vector<Index> WorldSpec::sample_counts() const {
  std::vector<Index> out;
  out.reserve(objectives.size());
  for (const auto& obj : objectives) out.push_back(obj->sample_count());
  return out;
}

double WorldSpec::global_value(const Vector& x) const {
  // Homogeneous shortcut: identical objectives evaluate once.
  const auto& first = objectives[static_cast<std::size_t>(assignment.good.front())];
  bool shared = true;
  for (const Index i : assignment.good)
    if (objectives[static_cast<std::size_t>(i)] != first) {
      shared = false;
      break;
    }
  if (shared) return first->value(x);
  NeumaierSum acc;
  for (const Index i : assignment.good) acc.add(objectives[static_cast<std::size_t>(i)]->value(x));
  return acc.value() / static_cast<double>(good_count());
}

Vector WorldSpec::global_gradient(const Vector& x) const {
  const auto& first = objectives[static_cast<std::size_t>(assignment.good.front())];
  bool shared = true;
  for (const Index i : assignment.good)
    if (objectives[static_cast<std::size_t>(i)] != first) {
      shared = false;
      break;
    }
  if (shared) return first->gradient(x);
  Vector acc = Vector::Zero(dimension());
  for (const Index i : assignment.good)
    acc += objectives[static_cast<std::size_t>(i)]->gradient(x);
  return acc / static_cast<double>(good_count());
}

SmoothnessInfo WorldSpec::global_smoothness() const {
  NeumaierSum acc;
  double max_sample = 0.0;
  for (const Index i : assignment.good) {
    const auto info = objectives[static_cast<std::size_t>(i)]->smoothness();
    acc.add(info.l_bound);
    max_sample = std::max(max_sample, info.max_sample_l);
  }
  return {acc.value() / static_cast<double>(good_count()), max_sample};
}

double WorldSpec::global_pl_lower_bound() const {
  double mu = kInfinity;
  for (const Index i : assignment.good)
    mu = std::min(mu, objectives[static_cast<std::size_t>(i)]->pl_lower_bound());
  return mu;
}

WorldSpec make_logistic_world(const ClientAssignment& assignment, double eta,
                              const AttackSpec& attack, const Rational& delta) {
  if (assignment.good.empty()) throw std::invalid_argument("make_logistic_world: no good clients");
  WorldSpec world;
  world.assignment = assignment;
  world.attack = attack;
  world.delta = delta;
  world.objectives.reserve(assignment.datasets.size());
  for (Index i = 0; i < assignment.client_count(); ++i) {
    auto data = assignment.datasets[static_cast<std::size_t>(i)];
    if (attack.kind == AttackKind::LabelFlipping && !assignment.is_good(i)) {
      auto poisoned = std::make_shared<Dataset>(*data);
      poisoned->labels = Vector::Ones(poisoned->labels.size()) - poisoned->labels;
      world.assignment.datasets[static_cast<std::size_t>(i)] = poisoned;
      data = poisoned;
    }
    world.objectives.push_back(std::make_shared<LogisticObjective>(data, eta));
  }
  return world;
}

WorldSpec make_quadratic_world(const Matrix& a, const Vector& b, Index n, Index byzantine,
                               const AttackSpec& attack, const Rational& delta) {
  if (n < 1 || byzantine < 0 || 2 * byzantine >= n)
    throw std::invalid_argument("make_quadratic_world: need B < n/2");
  if (attack.kind == AttackKind::LabelFlipping)
    throw std::invalid_argument("make_quadratic_world: label flipping needs labelled data");
  WorldSpec world;
  world.attack = attack;
  world.delta = delta;
  world.assignment.mode = SplitMode::Homogeneous;
  world.assignment.good.resize(static_cast<std::size_t>(n - byzantine));
  std::iota(world.assignment.good.begin(), world.assignment.good.end(), Index{0});
  world.assignment.datasets.assign(static_cast<std::size_t>(n), nullptr);
  auto obj = std::make_shared<QuadraticObjective>(a, b);
  world.objectives.assign(static_cast<std::size_t>(n), obj);
  return world;
}

}  // namespace byzsim
