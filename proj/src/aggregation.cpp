#include "byzsim/aggregation.hpp"

#include "byzsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace byzsim {

namespace {

void check_inputs(const std::vector<Vector>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("aggregate: empty input");
  const Index d = inputs.front().size();
  for (const auto& v : inputs)
    if (v.size() != d) throw std::invalid_argument("aggregate: dimension mismatch");
}

Vector mean_of(const std::vector<Vector>& inputs) {
  Vector acc = Vector::Zero(inputs.front().size());
  for (const auto& v : inputs) acc += v;
  return acc / static_cast<double>(inputs.size());
}

// Midpoint of the two central order statistics for even counts.
double median_inplace(std::vector<double>& values) {
  const auto m = values.size();
  const auto mid = m / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double hi = values[mid];
  if (m % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lo + hi);
}

Vector coordinate_median(const std::vector<Vector>& inputs) {
  const Index d = inputs.front().size();
  Vector out(d);
  std::vector<double> column(inputs.size());
  for (Index c = 0; c < d; ++c) {
    for (std::size_t i = 0; i < inputs.size(); ++i) column[i] = inputs[i][c];
    out[c] = median_inplace(column);
  }
  return out;
}

Vector geometric_median(const AggregatorSpec& spec, const std::vector<Vector>& inputs) {
  // Weiszfeld iteration with smoothed denominators; every iterate is a convex
  // combination of the inputs, so the output stays in their hull.
  Vector x = mean_of(inputs);
  for (Index it = 0; it < spec.gm_max_iters; ++it) {
    double weight_sum = 0.0;
    Vector next = Vector::Zero(x.size());
    for (const auto& v : inputs) {
      const double w = 1.0 / ((x - v).norm() + spec.gm_smoothing);
      weight_sum += w;
      next += w * v;
    }
    next /= weight_sum;
    const double moved = (next - x).norm();
    x = next;
    if (moved <= spec.gm_tol) break;
  }
  return x;
}

Vector krum(const AggregatorSpec& spec, const std::vector<Vector>& inputs) {
  const auto m = static_cast<Index>(inputs.size());
  Index assumed = spec.krum_assumed_byzantine;
  if (assumed < 0) {
    // ceil(delta * m) of the inputs this rule actually sees
    const Rational scaled = spec.delta * m;
    const BigInt num = boost::multiprecision::numerator(scaled);
    const BigInt den = boost::multiprecision::denominator(scaled);
    BigInt q = num / den;
    if (q * den < num) q += 1;
    assumed = q.convert_to<Index>();
  }
  const Index neighbours = m - assumed - 2;
  if (neighbours < 1)
    throw std::invalid_argument("aggregate: Krum infeasible, m - B - 2 < 1");

  Matrix dist2 = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j)
      dist2(i, j) = dist2(j, i) =
          (inputs[static_cast<std::size_t>(i)] - inputs[static_cast<std::size_t>(j)])
              .squaredNorm();

  Index best = 0;
  double best_score = kInfinity;
  std::vector<double> row(static_cast<std::size_t>(m - 1));
  for (Index i = 0; i < m; ++i) {
    std::size_t n = 0;
    for (Index j = 0; j < m; ++j)
      if (j != i) row[n++] = dist2(i, j);
    std::nth_element(row.begin(), row.begin() + (neighbours - 1), row.end());
    double score = 0.0;
    for (Index t = 0; t < neighbours; ++t) score += row[static_cast<std::size_t>(t)];
    if (score < best_score) {  // strict: lowest index wins ties
      best_score = score;
      best = i;
    }
  }
  return inputs[static_cast<std::size_t>(best)];
}

Vector trimmed_mean(const AggregatorSpec& spec, const std::vector<Vector>& inputs) {
  const auto m = static_cast<Index>(inputs.size());
  const auto trim = static_cast<Index>(std::floor(spec.trim_fraction * static_cast<double>(m)));
  if (2 * trim >= m) throw std::invalid_argument("aggregate: trimmed mean drops everything");
  const Index d = inputs.front().size();
  Vector out(d);
  std::vector<double> column(static_cast<std::size_t>(m));
  for (Index c = 0; c < d; ++c) {
    for (std::size_t i = 0; i < inputs.size(); ++i) column[i] = inputs[i][c];
    std::sort(column.begin(), column.end());
    double acc = 0.0;
    for (Index i = trim; i < m - trim; ++i) acc += column[static_cast<std::size_t>(i)];
    out[c] = acc / static_cast<double>(m - 2 * trim);
  }
  return out;
}

}  // namespace

void AggregatorSpec::validate() const {
  if (bucket_size < 1) throw std::invalid_argument("AggregatorSpec: bucket size >= 1");
  if (rule == AggregationRule::TrimmedMean &&
      !(trim_fraction >= 0.0 && trim_fraction < 0.5))
    throw std::invalid_argument("AggregatorSpec: trim fraction must lie in [0, 1/2)");
  if (rule == AggregationRule::GeometricMedian &&
      (gm_max_iters < 1 || gm_tol < 0.0 || gm_smoothing <= 0.0))
    throw std::invalid_argument("AggregatorSpec: bad Weiszfeld controls");
  if (delta < 0 || delta >= Rational(1, 2))
    throw std::invalid_argument("AggregatorSpec: delta must lie in [0, 1/2)");
}

std::vector<Vector> bucketing(const std::vector<Vector>& inputs, Index s, RngStream& rng) {
  check_inputs(inputs);
  if (s < 1) throw std::invalid_argument("bucketing: bucket size >= 1");
  const auto n = static_cast<Index>(inputs.size());
  const auto perm = rng.permutation(n);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>((n + s - 1) / s));
  for (Index start = 0; start < n; start += s) {
    const Index stop = std::min(start + s, n);
    Vector acc = Vector::Zero(inputs.front().size());
    for (Index t = start; t < stop; ++t)
      acc += inputs[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])];
    out.push_back(acc / static_cast<double>(stop - start));
  }
  return out;
}

Vector aggregate(const AggregatorSpec& spec, const std::vector<Vector>& inputs,
                 RngStream& rng) {
  spec.validate();
  check_inputs(inputs);
  const std::vector<Vector>* work = &inputs;
  std::vector<Vector> buckets;
  if (spec.bucket_size > 1) {
    buckets = bucketing(inputs, spec.bucket_size, rng);
    work = &buckets;
  }
  Vector out;
  switch (spec.rule) {
    case AggregationRule::Mean:
      out = mean_of(*work);
      break;
    case AggregationRule::CoordinateMedian:
      out = coordinate_median(*work);
      break;
    case AggregationRule::GeometricMedian:
      out = geometric_median(spec, *work);
      break;
    case AggregationRule::Krum:
      out = krum(spec, *work);
      break;
    case AggregationRule::TrimmedMean:
      out = trimmed_mean(spec, *work);
      break;
  }
  ensure_finite(out, "aggregate");
  return out;
}

AggregatorBoundInfo f_a_constant(const AggregatorSpec& spec, Index dimension) {
  spec.validate();
  if (dimension < 1) throw std::invalid_argument("f_a_constant: dimension must be positive");
  // Bucketing never increases the bound: bucket means obey the same cap.
  switch (spec.rule) {
    case AggregationRule::Mean:
    case AggregationRule::GeometricMedian:
    case AggregationRule::Krum:
    case AggregationRule::TrimmedMean:
      return {1.0};
    case AggregationRule::CoordinateMedian:
      return {std::sqrt(static_cast<double>(dimension))};
  }
  throw std::logic_error("f_a_constant: unreachable");
}

RaggReport empirical_ragg_check(const AggregatorSpec& spec, const RaggGenerator& generator,
                                Index trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("empirical_ragg_check: trials >= 1");
  const RngRoot root(seed);
  NeumaierSum err_acc;
  NeumaierSum sigma_acc;
  double byz_fraction = 0.0;
  bool degenerate = false;

  std::vector<Vector> inputs;
  std::vector<bool> good;
  for (Index t = 0; t < trials; ++t) {
    inputs.clear();
    good.clear();
    generator(t, inputs, good);
    if (inputs.empty() || good.size() != inputs.size())
      throw std::invalid_argument("empirical_ragg_check: generator produced bad trial");

    std::vector<Vector> good_inputs;
    for (std::size_t i = 0; i < inputs.size(); ++i)
      if (good[i]) good_inputs.push_back(inputs[i]);
    if (good_inputs.empty())
      throw std::invalid_argument("empirical_ragg_check: a trial needs good inputs");

    const double sigma_sq =
        good_inputs.size() >= 2 ? squared_distance_mean(good_inputs) : 0.0;
    const Vector good_mean = mean_of(good_inputs);
    auto lane = root.lane(static_cast<std::uint64_t>(t), kServerLane, Purpose::Bucketing);
    const Vector agg = aggregate(spec, inputs, lane);

    err_acc.add((agg - good_mean).squaredNorm());
    sigma_acc.add(sigma_sq);
    const auto byz = inputs.size() - good_inputs.size();
    byz_fraction += static_cast<double>(byz) / static_cast<double>(inputs.size());
    if (byz > 0 && sigma_sq == 0.0) degenerate = true;
  }

  RaggReport report;
  report.trials = trials;
  report.mean_error_sq = err_acc.value() / static_cast<double>(trials);
  report.mean_sigma_sq = sigma_acc.value() / static_cast<double>(trials);
  report.delta_real = byz_fraction / static_cast<double>(trials);
  report.degenerate = degenerate;
  const double denom = report.delta_real * report.mean_sigma_sq;
  if (denom > 0.0) {
    report.implied_c = report.mean_error_sq / denom;
  } else {
    report.implied_c = report.mean_error_sq == 0.0 ? 0.0 : kInfinity;
  }
  return report;
}

}  // namespace byzsim
