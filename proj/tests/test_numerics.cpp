#include "byzsim/numerics.hpp"
#include "byzsim/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace byzsim;

TEST_CASE("clip scales vectors above the level") {
  Vector x(2);
  x << 3.0, 4.0;
  const Vector out = clip(x, ClipLevel(2.5));
  CHECK(out[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("clip of the zero vector is the zero vector") {
  const Vector zero = Vector::Zero(2);
  const Vector out = clip(zero, ClipLevel(1.0));
  CHECK(out.norm() == 0.0);
}

TEST_CASE("clip leaves short vectors untouched") {
  Vector x(2);
  x << 1.0, 1.0;
  const Vector out = clip(x, ClipLevel(10.0));
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 1.0);
  const Vector unclipped = clip(x, ClipLevel::none());
  CHECK(unclipped == x);
}

TEST_CASE("clip level rejects negative and NaN values") {
  CHECK_THROWS_AS(ClipLevel(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(ClipLevel(std::nan("")), std::invalid_argument);
  CHECK(ClipLevel(0.0).lambda == 0.0);
  CHECK_FALSE(ClipLevel::none().enabled());
}

TEST_CASE("clip norm bounds and direction preservation") {
  RngRoot root(11);
  for (int t = 0; t < 200; ++t) {
    auto lane = root.lane(static_cast<std::uint64_t>(t), kServerLane, Purpose::Probe);
    const Vector x = lane.gaussian_vector(5) * std::exp(2.0 * lane.uniform());
    const double lambda = lane.uniform() * 3.0;
    const Vector out = clip(x, ClipLevel(lambda));
    CHECK(out.norm() <= lambda * (1.0 + 1e-12));
    CHECK(out.norm() <= x.norm() * (1.0 + 1e-12));
    if (x.norm() > 0.0 && lambda > 0.0) {
      const double cosine = out.dot(x) / (out.norm() * x.norm());
      CHECK(cosine == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("clip is positively homogeneous") {
  RngRoot root(12);
  for (int t = 0; t < 100; ++t) {
    auto lane = root.lane(static_cast<std::uint64_t>(t), kServerLane, Purpose::Probe);
    const Vector x = lane.gaussian_vector(4);
    const double lambda = 0.5 + lane.uniform();
    const double scale = 0.1 + 5.0 * lane.uniform();
    const Vector lhs = clip(Vector(scale * x), ClipLevel(scale * lambda));
    const Vector rhs = scale * clip(x, ClipLevel(lambda));
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("squared_distance_mean matches hand values and the pair oracle") {
  std::vector<Vector> identical{Vector::Zero(2), Vector::Zero(2)};
  CHECK(squared_distance_mean(identical) == 0.0);

  Vector a(2), b(2);
  a << 0.0, 0.0;
  b << 2.0, 0.0;
  CHECK(squared_distance_mean({a, b}) == doctest::Approx(4.0));

  RngRoot root(21);
  auto lane = root.lane(0, kServerLane, Purpose::Probe);
  std::vector<Vector> vs;
  for (int i = 0; i < 5; ++i) vs.push_back(lane.gaussian_vector(3));
  CHECK(squared_distance_mean(vs) ==
        doctest::Approx(oracles::pairwise_mean_squared_distance(vs)).epsilon(1e-13));

  CHECK_THROWS_AS(squared_distance_mean({a}), std::invalid_argument);
}

TEST_CASE("compensated summation survives cancellation") {
  NeumaierSum acc;
  acc.add(1e100);
  acc.add(1.0);
  acc.add(-1e100);
  CHECK(acc.value() == 1.0);
}

TEST_CASE("ensure_finite rejects NaN and infinity") {
  Vector v(2);
  v << 1.0, std::nan("");
  CHECK_THROWS_AS(ensure_finite(v, "test"), std::domain_error);
  v[1] = kInfinity;
  CHECK_THROWS_AS(ensure_finite(v, "test"), std::domain_error);
  v[1] = 0.0;
  CHECK_NOTHROW(ensure_finite(v, "test"));
}

TEST_CASE("rng lanes replay identically") {
  RngRoot root(42);
  auto a = root.lane(3, 7, Purpose::Minibatch);
  auto b = root.lane(3, 7, Purpose::Minibatch);
  for (int i = 0; i < 50; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct lanes are distinct streams") {
  RngRoot root(42);
  auto a = root.lane(3, 7, Purpose::Minibatch);
  auto b = root.lane(3, 7, Purpose::Compressor);
  auto c = root.lane(3, 8, Purpose::Minibatch);
  auto d = root.lane(4, 7, Purpose::Minibatch);
  int same_ab = 0, same_ac = 0, same_ad = 0;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    same_ab += va == b.next_u64();
    same_ac += va == c.next_u64();
    same_ad += va == d.next_u64();
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
  CHECK(same_ad == 0);
}

TEST_CASE("uniform draws live in [0,1) and bernoulli respects bounds") {
  RngRoot root(7);
  auto lane = root.lane(0, kServerLane, Purpose::Probe);
  for (int i = 0; i < 1000; ++i) {
    const double u = lane.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK_THROWS_AS(lane.bernoulli(1.5), std::invalid_argument);
  auto gate = root.lane(1, kServerLane, Purpose::Gate);
  for (int i = 0; i < 100; ++i) CHECK(gate.bernoulli(1.0));
}

TEST_CASE("subset sampling returns sorted distinct ids of the right size") {
  RngRoot root(9);
  auto lane = root.lane(0, kServerLane, Purpose::Cohort);
  for (int t = 0; t < 100; ++t) {
    const auto subset = lane.sample_without_replacement(10, 4);
    CHECK(subset.size() == 4);
    std::set<Index> seen(subset.begin(), subset.end());
    CHECK(seen.size() == 4);
    CHECK(std::is_sorted(subset.begin(), subset.end()));
    for (const auto id : subset) {
      CHECK(id >= 0);
      CHECK(id < 10);
    }
  }
  const auto all = lane.sample_without_replacement(6, 6);
  for (Index i = 0; i < 6; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("permutation covers every element") {
  RngRoot root(10);
  auto lane = root.lane(0, kServerLane, Purpose::Bucketing);
  const auto perm = lane.permutation(12);
  std::set<Index> seen(perm.begin(), perm.end());
  CHECK(seen.size() == 12);
}

TEST_CASE("gaussian moments are sane") {
  RngRoot root(13);
  auto lane = root.lane(0, kServerLane, Purpose::Probe);
  NeumaierSum mean, var;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = lane.normal();
    mean.add(z);
    var.add(z * z);
  }
  CHECK(std::abs(mean.value() / n) < 0.01);
  CHECK(var.value() / n == doctest::Approx(1.0).epsilon(0.01));
}
