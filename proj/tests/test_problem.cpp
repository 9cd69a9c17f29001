#include "byzsim/problem.hpp"
#include "byzsim/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

using namespace byzsim;

namespace {

std::shared_ptr<Dataset> toy_dataset(std::uint64_t seed, Index m, Index d) {
  RngStream lane(seed, 0, kServerLane, Purpose::DataGen);
  return std::make_shared<Dataset>(synthetic_dataset(m, d, lane));
}

}  // namespace

TEST_CASE("libsvm rows transcribe directly") {
  std::istringstream in("+1 1:0.5 3:2.0\n");
  const Dataset ds = parse_libsvm(in);
  CHECK(ds.sample_count() == 1);
  CHECK(ds.dimension() == 3);
  CHECK(ds.labels[0] == 1.0);
  CHECK(ds.features(0, 0) == 0.5);
  CHECK(ds.features(0, 1) == 0.0);
  CHECK(ds.features(0, 2) == 2.0);
}

TEST_CASE("libsvm -1 labels map to 0") {
  std::istringstream in("-1 2:1\n");
  const Dataset ds = parse_libsvm(in);
  CHECK(ds.labels[0] == 0.0);
  CHECK(ds.dimension() == 2);
  CHECK(ds.features(0, 1) == 1.0);
}

TEST_CASE("libsvm errors carry line numbers") {
  std::istringstream empty("");
  CHECK_THROWS_WITH_AS(parse_libsvm(empty), "parse_libsvm: no samples", std::runtime_error);

  std::istringstream bad_label("+1 1:1\nfoo 1:1\n");
  CHECK_THROWS_WITH_AS(parse_libsvm(bad_label),
                       "parse_libsvm: line 2: non-numeric label 'foo'", std::runtime_error);

  std::istringstream dup("+1 2:1 2:3\n");
  CHECK_THROWS_WITH_AS(parse_libsvm(dup), "parse_libsvm: line 1: duplicate feature index",
                       std::runtime_error);

  std::istringstream decreasing("+1 3:1 2:1\n");
  CHECK_THROWS_AS(parse_libsvm(decreasing), std::runtime_error);

  std::istringstream bad_value("-1 1:abc\n");
  CHECK_THROWS_AS(parse_libsvm(bad_value), std::runtime_error);

  std::istringstream bad_index("-1 0:1\n");
  CHECK_THROWS_AS(parse_libsvm(bad_index), std::runtime_error);

  std::istringstream odd_label("2 1:1\n");
  CHECK_THROWS_AS(parse_libsvm(odd_label), std::runtime_error);
}

TEST_CASE("libsvm round trip through the writer") {
  const auto ds = toy_dataset(3, 20, 4);
  std::ostringstream out;
  write_libsvm(*ds, out);
  std::istringstream in(out.str());
  const Dataset back = parse_libsvm(in);
  CHECK(back.sample_count() == ds->sample_count());
  CHECK(back.dimension() == ds->dimension());
  CHECK((back.features - ds->features).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.labels - ds->labels).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("logistic value at zero is log 2") {
  auto ds = std::make_shared<Dataset>();
  ds->features = Matrix::Zero(1, 2);
  ds->features << 0.7, -0.3;
  ds->labels = Vector::Zero(1);
  ds->labels << 1.0;
  const LogisticObjective obj(ds, 0.0);
  CHECK(obj.value(Vector::Zero(2)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("logistic value matches the scalar oracle") {
  auto ds = std::make_shared<Dataset>();
  ds->features = Matrix::Zero(1, 2);
  ds->features << 1.0, 0.0;
  ds->labels = Vector::Ones(1);
  const LogisticObjective obj(ds, 0.01);
  Vector x(2);
  x << 1.0, 0.0;
  // -log(sigmoid(1)) + 0.01, evaluated independently
  const double expected = -std::log(1.0 / (1.0 + std::exp(-1.0))) + 0.01;
  CHECK(expected == doctest::Approx(0.32326168751822286).epsilon(1e-15));
  CHECK(obj.value(x) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("quadratic value at zero is zero and dimensions are checked") {
  Matrix a(2, 2);
  a << 1.0, 0.0, 0.0, 4.0;
  const QuadraticObjective obj(a, Vector::Ones(2));
  CHECK(obj.value(Vector::Zero(2)) == 0.0);
  CHECK_THROWS_AS(obj.value(Vector::Zero(3)), std::invalid_argument);
  const auto ds = toy_dataset(4, 10, 3);
  const LogisticObjective logit(ds, 0.0);
  CHECK_THROWS_AS(logit.value(Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("quadratic gradient vanishes at the minimizer") {
  Matrix a(2, 2);
  a << 2.0, 0.5, 0.5, 1.0;
  Vector b(2);
  b << 1.0, -1.0;
  const QuadraticObjective obj(a, b);
  CHECK(obj.gradient(obj.minimizer()).norm() <= 1e-12);
}

TEST_CASE("logistic gradient at zero reduces to mean (1/2 - y) a") {
  const auto ds = toy_dataset(5, 12, 3);
  const LogisticObjective obj(ds, 0.0);
  Vector expected = Vector::Zero(3);
  for (Index j = 0; j < ds->sample_count(); ++j)
    expected += (0.5 - ds->labels[j]) * ds->features.row(j).transpose();
  expected /= static_cast<double>(ds->sample_count());
  CHECK((obj.gradient(Vector::Zero(3)) - expected).norm() <= 1e-14);
}

TEST_CASE("analytic gradients match central finite differences") {
  const auto ds = toy_dataset(6, 30, 4);
  const LogisticObjective logit(ds, 0.01);
  Matrix a(3, 3);
  a << 3.0, 0.2, 0.0, 0.2, 1.0, -0.1, 0.0, -0.1, 2.0;
  Vector b(3);
  b << 1.0, 0.0, -2.0;
  const QuadraticObjective quad(a, b);

  RngRoot root(17);
  for (int t = 0; t < 100; ++t) {
    auto lane = root.lane(static_cast<std::uint64_t>(t), kServerLane, Purpose::Probe);
    const Vector xl = lane.gaussian_vector(4);
    const Vector gl = logit.gradient(xl);
    const Vector fdl = oracles::finite_difference_gradient(
        [&](const Vector& v) { return logit.value(v); }, xl);
    CHECK((gl - fdl).norm() / std::max(gl.norm(), 1e-12) < 1e-6);

    const Vector xq = lane.gaussian_vector(3);
    const Vector gq = quad.gradient(xq);
    const Vector fdq = oracles::finite_difference_gradient(
        [&](const Vector& v) { return quad.value(v); }, xq);
    CHECK((gq - fdq).norm() / std::max(gq.norm(), 1e-12) < 1e-6);
  }
}

TEST_CASE("minibatch delta degenerate cases") {
  const auto ds = toy_dataset(7, 8, 3);
  const LogisticObjective obj(ds, 0.05);
  RngRoot root(18);
  auto lane = root.lane(0, kServerLane, Purpose::Probe);
  const Vector x = lane.gaussian_vector(3);
  const Vector y = lane.gaussian_vector(3);

  CHECK(minibatch_delta(obj, {0, 3, 5}, x, x).norm() == 0.0);

  std::vector<Index> all(8);
  std::iota(all.begin(), all.end(), Index{0});
  const Vector full = minibatch_delta(obj, all, x, y);
  const Vector exact = obj.gradient(x) - obj.gradient(y);
  CHECK((full - exact).norm() <= 1e-12 * std::max(1.0, exact.norm()));

  CHECK_THROWS_AS(minibatch_delta(obj, {}, x, y), std::invalid_argument);
  CHECK_THROWS_AS(minibatch_delta(obj, {99}, x, y), std::invalid_argument);
}

TEST_CASE("singleton batches average to the exact gradient difference") {
  const auto ds = toy_dataset(8, 6, 2);
  const LogisticObjective obj(ds, 0.02);
  RngRoot root(19);
  auto lane = root.lane(0, kServerLane, Purpose::Probe);
  const Vector x = lane.gaussian_vector(2);
  const Vector y = lane.gaussian_vector(2);
  Vector acc = Vector::Zero(2);
  for (Index j = 0; j < 6; ++j) acc += minibatch_delta(obj, {j}, x, y);
  acc /= 6.0;
  const Vector exact = obj.gradient(x) - obj.gradient(y);
  CHECK((acc - exact).norm() <= 1e-12);
}

TEST_CASE("homogeneous split shares the dataset and has zero heterogeneity") {
  const auto ds = toy_dataset(9, 40, 3);
  RngStream lane(9, 0, kServerLane, Purpose::Init);
  const auto split = split_clients(ds, 20, 5, SplitMode::Homogeneous, lane);
  CHECK(split.client_count() == 20);
  CHECK(split.good_count() == 15);
  for (const auto& handle : split.datasets) CHECK(handle == ds);

  // identical local objectives imply identically zero gradient dispersion
  const LogisticObjective f0(split.datasets[0], 0.01);
  const LogisticObjective f7(split.datasets[7], 0.01);
  RngRoot probes(20);
  auto probe = probes.lane(0, kServerLane, Purpose::Probe);
  const Vector x = probe.gaussian_vector(3);
  CHECK((f0.gradient(x) - f7.gradient(x)).norm() == 0.0);
}

TEST_CASE("label-sorted split shards by label") {
  auto ds = std::make_shared<Dataset>();
  ds->features = Matrix::Identity(4, 4);
  ds->labels = Vector::Zero(4);
  ds->labels << 0.0, 0.0, 1.0, 1.0;
  RngStream lane(1, 0, kServerLane, Purpose::Init);
  const auto split = split_clients(ds, 2, 0, SplitMode::LabelSortedHeterogeneous, lane);
  CHECK(split.datasets[0]->labels.maxCoeff() == 0.0);
  CHECK(split.datasets[1]->labels.minCoeff() == 1.0);
}

TEST_CASE("splits reject a byzantine majority") {
  const auto ds = toy_dataset(10, 10, 2);
  RngStream lane(1, 0, kServerLane, Purpose::Init);
  CHECK_THROWS_AS(split_clients(ds, 10, 5, SplitMode::Homogeneous, lane),
                  std::invalid_argument);
  CHECK_THROWS_AS(split_clients(ds, 4, 2, SplitMode::Homogeneous, lane),
                  std::invalid_argument);
}

TEST_CASE("reference solution solves quadratics in closed form") {
  const QuadraticObjective obj(Matrix::Identity(2, 2), [] {
    Vector b(2);
    b << 1.0, 2.0;
    return b;
  }());
  const auto ref = reference_solution(obj);
  CHECK(ref.x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ref.x[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ref.f_star == doctest::Approx(-2.5).epsilon(1e-14));
}

TEST_CASE("reference solution drives the logistic gradient to tolerance") {
  const auto ds = toy_dataset(11, 10, 2);
  const LogisticObjective obj(ds, 0.01);
  const auto ref = reference_solution(obj, 1e-10);
  CHECK(ref.grad_norm <= 1e-10);

  // global-minimum property on random probes
  RngRoot root(22);
  for (int t = 0; t < 100; ++t) {
    auto lane = root.lane(static_cast<std::uint64_t>(t), kServerLane, Purpose::Probe);
    const Vector x = ref.x + lane.gaussian_vector(2);
    CHECK(obj.value(x) >= ref.f_star - 1e-12);
  }

  // fixed point: one descent step barely moves
  const double step = 1.0 / measure_smoothness(obj).l_bound;
  CHECK((step * obj.gradient(ref.x)).norm() <= 1e-10 * step * 1.001);
}

TEST_CASE("PL inequality holds with mu = 2 eta") {
  const auto ds = toy_dataset(12, 25, 3);
  const LogisticObjective obj(ds, 0.01);
  const double mu = obj.pl_lower_bound();
  CHECK(mu == doctest::Approx(0.02));
  const auto ref = reference_solution(obj, 1e-11);
  RngRoot root(23);
  for (int t = 0; t < 50; ++t) {
    auto lane = root.lane(static_cast<std::uint64_t>(t), kServerLane, Purpose::Probe);
    const Vector x = lane.gaussian_vector(3);
    CHECK(obj.gradient(x).squaredNorm() >=
          2.0 * mu * (obj.value(x) - ref.f_star) * (1.0 - 1e-9));
  }
}

TEST_CASE("smoothness bounds: closed forms and the random-pair oracle") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 4.0;
  const QuadraticObjective quad(a, Vector::Zero(2));
  CHECK(measure_smoothness(quad).l_bound == doctest::Approx(4.0).epsilon(1e-12));

  auto single = std::make_shared<Dataset>();
  single->features = Matrix::Zero(1, 2);
  single->features << 2.0, 0.0;
  single->labels = Vector::Ones(1);
  const LogisticObjective one(single, 0.0);
  CHECK(measure_smoothness(one).max_sample_l == doctest::Approx(1.0));

  const auto ds = toy_dataset(13, 50, 4);
  const LogisticObjective obj(ds, 0.01);
  const double l = measure_smoothness(obj).l_bound;
  RngRoot root(24);
  for (int t = 0; t < 1000; ++t) {
    auto lane = root.lane(static_cast<std::uint64_t>(t), kServerLane, Purpose::Probe);
    const Vector x = lane.gaussian_vector(4);
    const Vector y = lane.gaussian_vector(4);
    CHECK((obj.gradient(x) - obj.gradient(y)).norm() <= l * (x - y).norm() * (1.0 + 1e-9));
  }
}

TEST_CASE("quadratic construction validates symmetry and definiteness") {
  Matrix bad(2, 2);
  bad << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(QuadraticObjective(bad, Vector::Zero(2)), std::invalid_argument);
  Matrix indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(QuadraticObjective(indefinite, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("synthetic datasets are deterministic per seed with binary labels") {
  const auto a = toy_dataset(31, 50, 4);
  const auto b = toy_dataset(31, 50, 4);
  CHECK((a->features - b->features).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a->labels - b->labels).cwiseAbs().maxCoeff() == 0.0);
  for (Index j = 0; j < a->sample_count(); ++j)
    CHECK((a->labels[j] == 0.0 || a->labels[j] == 1.0));
  const auto c = toy_dataset(32, 50, 4);
  CHECK((a->features - c->features).cwiseAbs().maxCoeff() > 0.0);
}
