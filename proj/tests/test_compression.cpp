#include "byzsim/compression.hpp"
#include "byzsim/numerics.hpp"

#include <doctest.h>

#include <cmath>

using namespace byzsim;

TEST_CASE("identity compressor returns the input unchanged") {
  RngRoot root(1);
  auto lane = root.lane(0, 0, Purpose::Compressor);
  Vector x(3);
  x << 1.5, -2.0, 0.25;
  CHECK(compress(CompressorSpec::identity(3), x, lane) == x);
}

TEST_CASE("rand-k on (2,0) with k=1 emits the two forced outcomes") {
  const auto spec = CompressorSpec::rand_k(2, 1);
  Vector x(2);
  x << 2.0, 0.0;
  RngRoot root(5);
  auto lane = root.lane(0, 0, Purpose::Compressor);
  Vector mean = Vector::Zero(2);
  const int draws = 40000;
  for (int t = 0; t < draws; ++t) {
    const Vector q = compress(spec, x, lane);
    const bool kept_first = q[0] == 4.0 && q[1] == 0.0;
    const bool kept_second = q[0] == 0.0 && q[1] == 0.0;
    CHECK((kept_first || kept_second));
    mean += q;
  }
  mean /= draws;
  CHECK(mean[0] == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("l2 quantization on (3,4): levels, firing rate, unbiased mean") {
  const auto spec = CompressorSpec::l2_quantization(2);
  Vector x(2);
  x << 3.0, 4.0;
  RngRoot root(6);
  auto lane = root.lane(0, 0, Purpose::Compressor);
  Vector mean = Vector::Zero(2);
  int first_fired = 0;
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    const Vector q = compress(spec, x, lane);
    CHECK((q[0] == 0.0 || q[0] == 5.0));
    CHECK((q[1] == 0.0 || q[1] == 5.0));
    first_fired += q[0] == 5.0;
    mean += q;
  }
  mean /= draws;
  CHECK(static_cast<double>(first_fired) / draws == doctest::Approx(0.6).epsilon(0.02));
  CHECK((mean - x).norm() / x.norm() <= 0.01);
}

TEST_CASE("compressor constants match their closed forms") {
  CHECK(omega(CompressorSpec::rand_k(100, 1)) == doctest::Approx(99.0));
  CHECK(omega(CompressorSpec::identity(7)) == 0.0);
  CHECK(omega(CompressorSpec::l2_quantization(4)) == doctest::Approx(1.0));

  CHECK(dq_bound(CompressorSpec::rand_k(100, 1)) == doctest::Approx(100.0));
  CHECK(dq_bound(CompressorSpec::identity(3)) == 1.0);
  CHECK(dq_bound(CompressorSpec::l2_quantization(9)) == doctest::Approx(3.0));

  CHECK(expected_density(CompressorSpec::rand_k(10, 7)) == doctest::Approx(7.0));
  CHECK(expected_density(CompressorSpec::identity(5)) == doctest::Approx(5.0));
  CHECK(expected_density(CompressorSpec::l2_quantization(16)) == doctest::Approx(4.0));
}

TEST_CASE("hard norm bound holds on every draw") {
  RngRoot root(7);
  const std::vector<CompressorSpec> specs = {
      CompressorSpec::rand_k(8, 2), CompressorSpec::l2_quantization(8),
      CompressorSpec::identity(8)};
  for (const auto& spec : specs) {
    const double bound = dq_bound(spec);
    auto probe = root.lane(0, static_cast<std::int64_t>(spec.kind), Purpose::Probe);
    auto lane = root.lane(1, static_cast<std::int64_t>(spec.kind), Purpose::Compressor);
    for (int t = 0; t < 10000; ++t) {
      const Vector x = probe.gaussian_vector(8);
      const Vector q = compress(spec, x, lane);
      CHECK(q.norm() <= bound * x.norm() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("rand-k keeps exactly k coordinates when none vanish") {
  const auto spec = CompressorSpec::rand_k(9, 4);
  RngRoot root(8);
  auto probe = root.lane(0, kServerLane, Purpose::Probe);
  auto lane = root.lane(0, 0, Purpose::Compressor);
  for (int t = 0; t < 500; ++t) {
    Vector x = probe.gaussian_vector(9);
    for (Index i = 0; i < 9; ++i)
      if (x[i] == 0.0) x[i] = 1.0;
    const Vector q = compress(spec, x, lane);
    Index nonzero = 0;
    for (Index i = 0; i < 9; ++i) nonzero += q[i] != 0.0;
    CHECK(nonzero == 4);
  }
}

TEST_CASE("compressing the zero vector yields zero for every kind") {
  RngRoot root(9);
  const Vector zero = Vector::Zero(6);
  for (const auto& spec : {CompressorSpec::identity(6), CompressorSpec::rand_k(6, 2),
                           CompressorSpec::l2_quantization(6)}) {
    auto lane = root.lane(0, static_cast<std::int64_t>(spec.kind), Purpose::Compressor);
    CHECK(compress(spec, zero, lane).norm() == 0.0);
  }
}

TEST_CASE("empirical variance stays within the omega bound") {
  RngRoot root(10);
  for (const auto& spec :
       {CompressorSpec::rand_k(12, 3), CompressorSpec::l2_quantization(12)}) {
    const double w = omega(spec);
    for (int v = 0; v < 20; ++v) {
      auto probe = root.lane(static_cast<std::uint64_t>(v),
                             static_cast<std::int64_t>(spec.kind), Purpose::Probe);
      const Vector x = probe.gaussian_vector(12);
      auto lane = root.lane(static_cast<std::uint64_t>(v) + 100,
                            static_cast<std::int64_t>(spec.kind), Purpose::Compressor);
      NeumaierSum acc;
      const int draws = 20000;
      for (int t = 0; t < draws; ++t) acc.add((compress(spec, x, lane) - x).squaredNorm());
      CHECK(acc.value() / draws <= (w + 0.05) * x.squaredNorm());
    }
  }
}

TEST_CASE("per-coordinate unbiasedness within three standard errors") {
  RngRoot root(14);
  for (const auto& spec :
       {CompressorSpec::rand_k(10, 3), CompressorSpec::l2_quantization(10)}) {
    auto probe = root.lane(0, static_cast<std::int64_t>(spec.kind), Purpose::Probe);
    const Vector x = probe.gaussian_vector(10);
    auto lane = root.lane(1, static_cast<std::int64_t>(spec.kind), Purpose::Compressor);
    const int draws = 100000;
    Vector sum = Vector::Zero(10);
    Vector sum_sq = Vector::Zero(10);
    for (int t = 0; t < draws; ++t) {
      const Vector q = compress(spec, x, lane);
      sum += q;
      sum_sq += q.cwiseAbs2();
    }
    const Vector mean = sum / draws;
    for (Index i = 0; i < 10; ++i) {
      const double var = sum_sq[i] / draws - mean[i] * mean[i];
      const double stderr_i = std::sqrt(std::max(var, 0.0) / draws);
      CHECK(std::abs(mean[i] - x[i]) <= 3.0 * stderr_i);
    }
  }
}

TEST_CASE("spec validation rejects bad shapes") {
  CHECK_THROWS_AS(CompressorSpec::rand_k(4, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CompressorSpec::rand_k(4, 5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CompressorSpec::identity(0).validate(), std::invalid_argument);
  RngRoot root(2);
  auto lane = root.lane(0, 0, Purpose::Compressor);
  Vector x(3);
  x << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(compress(CompressorSpec::identity(4), x, lane), std::invalid_argument);
}
