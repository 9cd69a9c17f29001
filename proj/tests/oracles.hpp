// Independent oracles used by the test and acceptance suites. Everything here
// recomputes expected values from first principles and stays off the library
// code paths it checks.
#pragma once

#include "byzsim/problem.hpp"
#include "byzsim/sampling.hpp"
#include "byzsim/types.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

using byzsim::BigInt;
using byzsim::Index;
using byzsim::Matrix;
using byzsim::Rational;
using byzsim::Vector;

/// Central finite differences with per-coordinate step scaling.
inline Vector finite_difference_gradient(const std::function<double(const Vector&)>& f,
                                         const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    Vector hi = x, lo = x;
    hi[i] += step;
    lo[i] -= step;
    g[i] = (f(hi) - f(lo)) / (2.0 * step);
  }
  return g;
}

/// Brute-force mean of squared distances over ordered pairs.
inline double pairwise_mean_squared_distance(const std::vector<Vector>& vs) {
  double acc = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t l = 0; l < vs.size(); ++l)
      if (i != l) acc += (vs[i] - vs[l]).squaredNorm();
  const double m = static_cast<double>(vs.size());
  return acc / (m * (m - 1.0));
}

/// Multi-resolution grid search for the minimiser of sum_i ||x - x_i|| over a
/// box in the plane. The objective is convex, so refining around the best grid
/// point is safe.
inline Vector grid_search_geometric_median(const std::vector<Vector>& points, double lo,
                                           double hi, double final_step = 1e-5) {
  auto cost = [&](double a, double b) {
    double total = 0.0;
    for (const auto& p : points) total += std::hypot(a - p[0], b - p[1]);
    return total;
  };
  double best_a = lo, best_b = lo;
  double step = (hi - lo) / 100.0;
  double center_a = (lo + hi) / 2.0, center_b = center_a;
  double span = (hi - lo) / 2.0;
  while (true) {
    double best_cost = std::numeric_limits<double>::infinity();
    for (double a = center_a - span; a <= center_a + span + step * 0.5; a += step) {
      for (double b = center_b - span; b <= center_b + span + step * 0.5; b += step) {
        const double c = cost(a, b);
        if (c < best_cost) {
          best_cost = c;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (step <= final_step) break;
    center_a = best_a;
    center_b = best_b;
    span = 2.0 * step;
    step /= 10.0;
  }
  Vector out(2);
  out << best_a, best_b;
  return out;
}

struct SubsetCounts {
  BigInt total = 0;
  BigInt majority = 0;             // subsets with >= ceil((1-delta)C) good members
  BigInt majority_with_client0 = 0;  // of those, subsets containing good client 0
};

/// Exhaustively scans all C-subsets of {0..n-1}, treating clients 0..g-1 as
/// good. The threshold is computed from exact rational arithmetic.
inline SubsetCounts enumerate_good_majority(Index n, Index g, Index c, const Rational& delta) {
  SubsetCounts counts;
  const Rational target = (Rational(1) - delta) * c;
  const BigInt num = boost::multiprecision::numerator(target);
  const BigInt den = boost::multiprecision::denominator(target);
  BigInt threshold_big = num / den;
  if (threshold_big * den < num) threshold_big += 1;
  const Index threshold = threshold_big.convert_to<Index>();

  std::vector<Index> subset(static_cast<std::size_t>(c));
  for (Index i = 0; i < c; ++i) subset[static_cast<std::size_t>(i)] = i;
  while (true) {
    counts.total += 1;
    Index good = 0;
    bool has_client0 = false;
    for (const Index member : subset) {
      if (member < g) ++good;
      if (member == 0) has_client0 = true;
    }
    if (good >= threshold) {
      counts.majority += 1;
      if (has_client0) counts.majority_with_client0 += 1;
    }
    Index i = c - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - c + i) --i;
    if (i < 0) break;
    subset[static_cast<std::size_t>(i)] += 1;
    for (Index j = i + 1; j < c; ++j)
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
  return counts;
}

}  // namespace oracles
