#include "byzsim/aggregation.hpp"
#include "byzsim/compression.hpp"
#include "byzsim/harness.hpp"
#include "byzsim/numerics.hpp"
#include "byzsim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace byzsim {

namespace {

std::vector<CheckResult> verify_compressors(Index trials, std::uint64_t seed) {
  const Index d = 32;
  const Index draws = std::max<Index>(trials, 1);
  const RngRoot root(seed);

  std::vector<CheckResult> checks;
  const std::vector<std::pair<std::string, CompressorSpec>> kinds = {
      {"identity", CompressorSpec::identity(d)},
      {"rand_k", CompressorSpec::rand_k(d, 8)},
      {"l2_quantization", CompressorSpec::l2_quantization(d)},
  };

  for (std::size_t which = 0; which < kinds.size(); ++which) {
    const auto& [name, spec] = kinds[which];
    const double w = omega(spec);
    const double dq = dq_bound(spec);
    double worst_mean_err = 0.0;
    double worst_var_ratio = 0.0;
    Index bound_violations = 0;

    for (Index v = 0; v < 20; ++v) {
      auto probe = root.lane(static_cast<std::uint64_t>(v), kServerLane, Purpose::Probe);
      Vector x = probe.gaussian_vector(d);
      x *= std::exp(2.0 * probe.uniform() - 1.0);  // vary the scale
      const double norm_sq = x.squaredNorm();

      Vector mean = Vector::Zero(d);
      NeumaierSum var_acc;
      auto lane = root.lane(static_cast<std::uint64_t>(v),
                            static_cast<std::int64_t>(which), Purpose::Compressor);
      for (Index t = 0; t < draws; ++t) {
        const Vector q = compress(spec, x, lane);
        mean += q;
        var_acc.add((q - x).squaredNorm());
        if (q.norm() > dq * std::sqrt(norm_sq) * (1.0 + 1e-12)) ++bound_violations;
      }
      mean /= static_cast<double>(draws);
      worst_mean_err = std::max(worst_mean_err, (mean - x).norm() / std::sqrt(norm_sq));
      worst_var_ratio =
          std::max(worst_var_ratio, var_acc.value() / static_cast<double>(draws) / norm_sq);
    }

    if (spec.kind == CompressorKind::Identity) {
      checks.push_back({name + " variance ratio", worst_var_ratio == 0.0, worst_var_ratio,
                        0.0, "identity is exact"});
      continue;
    }
    checks.push_back({name + " mean relative error", worst_mean_err <= 0.01, worst_mean_err,
                      0.01, std::to_string(draws) + " draws"});
    checks.push_back({name + " variance ratio", worst_var_ratio <= w + 0.05, worst_var_ratio,
                      w + 0.05, "omega = " + std::to_string(w)});
    checks.push_back({name + " hard norm bound", bound_violations == 0,
                      static_cast<double>(bound_violations), 0.0,
                      "D_Q = " + std::to_string(dq)});
  }
  return checks;
}

std::vector<CheckResult> verify_aggregators(Index trials, std::uint64_t seed) {
  const RngRoot root(seed);
  std::vector<CheckResult> checks;
  const std::vector<std::pair<std::string, AggregationRule>> rules = {
      {"mean", AggregationRule::Mean},
      {"coordinate_median", AggregationRule::CoordinateMedian},
      {"geometric_median", AggregationRule::GeometricMedian},
      {"krum", AggregationRule::Krum},
      {"trimmed_mean", AggregationRule::TrimmedMean},
  };

  std::uint64_t lane_round = 0;
  for (const auto& [name, rule] : rules) {
    for (const Index bucket : {Index{1}, Index{2}}) {
      AggregatorSpec spec;
      spec.rule = rule;
      spec.bucket_size = bucket;
      double worst_ratio = 0.0;
      for (Index t = 0; t < trials; ++t) {
        auto lane = root.lane(++lane_round, kServerLane, Purpose::Probe);
        // Krum needs m - B - 2 >= 1 on what it actually sees.
        const Index min_m = rule == AggregationRule::Krum ? (bucket > 1 ? 5 : 3) : 2;
        const auto m = min_m + static_cast<Index>(lane.uniform_below(9));
        const auto d = 2 + static_cast<Index>(lane.uniform_below(7));
        std::vector<Vector> inputs;
        double max_norm = 0.0;
        for (Index i = 0; i < m; ++i) {
          Vector v = lane.gaussian_vector(d);
          if (lane.uniform() < 0.1) v *= 100.0;  // occasional outlier
          max_norm = std::max(max_norm, v.norm());
          inputs.push_back(std::move(v));
        }
        auto agg_lane = root.lane(++lane_round, kServerLane, Purpose::Bucketing);
        const Vector out = aggregate(spec, inputs, agg_lane);
        const double f_a = f_a_constant(spec, d).f_a;
        worst_ratio = std::max(worst_ratio, out.norm() / (f_a * max_norm));
      }
      std::ostringstream label;
      label << name << (bucket > 1 ? " with bucketing" : "") << " norm bound";
      checks.push_back({label.str(), worst_ratio <= 1.0 + 1e-9, worst_ratio, 1.0,
                        std::to_string(trials) + " draws"});
    }
  }
  return checks;
}

std::vector<CheckResult> verify_clipping_lemma(Index trials, std::uint64_t seed) {
  const Index d = 5;
  const double lambda = 1.0;
  const RngRoot root(seed);
  std::vector<CheckResult> checks;
  const std::vector<std::pair<std::string, double>> cases = {
      {"||x|| = 0", 0.0}, {"||x|| = lambda/4", lambda / 4.0}, {"||x|| = lambda/2", lambda / 2.0}};

  std::uint64_t which = 0;
  for (const auto& [label, center_norm] : cases) {
    auto dir_lane = root.lane(which, kServerLane, Purpose::Probe);
    Vector x = dir_lane.gaussian_vector(d);
    x *= center_norm / std::max(x.norm(), 1e-300);
    const double sigma = lambda / (2.0 * std::sqrt(static_cast<double>(d)));

    auto lane = root.lane(which++, kServerLane, Purpose::Compressor);
    NeumaierSum clipped_acc;
    NeumaierSum raw_acc;
    for (Index t = 0; t < trials; ++t) {
      const Vector draw = x + sigma * lane.gaussian_vector(d);
      raw_acc.add((draw - x).squaredNorm());
      clipped_acc.add((clip(draw, ClipLevel(lambda)) - x).squaredNorm());
    }
    const double ratio = clipped_acc.value() / raw_acc.value();
    checks.push_back({"clipped second moment, " + label, ratio <= 10.0, ratio, 10.0,
                      std::to_string(trials) + " Gaussian draws"});
  }
  return checks;
}

// Exhaustive C-subset scan of [n]: counts majority-good subsets and, among
// them, those containing the fixed good client 0.
struct EnumerationCounts {
  BigInt total = 0;
  BigInt majority = 0;
  BigInt majority_with_fixed = 0;
};

EnumerationCounts enumerate_subsets(Index n, Index g, Index c, const Rational& delta) {
  EnumerationCounts counts;
  const Index threshold = majority_threshold(c, delta);
  std::vector<Index> subset(static_cast<std::size_t>(c));
  for (Index i = 0; i < c; ++i) subset[static_cast<std::size_t>(i)] = i;
  while (true) {
    counts.total += 1;
    Index good = 0;
    bool has_fixed = false;
    for (const Index member : subset) {
      if (member < g) ++good;  // clients 0..g-1 are the good ones
      if (member == 0) has_fixed = true;
    }
    if (good >= threshold) {
      counts.majority += 1;
      if (has_fixed) counts.majority_with_fixed += 1;
    }
    // next combination in lexicographic order
    Index i = c - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - c + i) --i;
    if (i < 0) break;
    subset[static_cast<std::size_t>(i)] += 1;
    for (Index j = i + 1; j < c; ++j)
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
  return counts;
}

std::vector<CheckResult> verify_probabilities(Index n_max) {
  const std::vector<Rational> deltas = {Rational(1, 10), Rational(1, 5), Rational(1, 4),
                                        Rational(3, 10), Rational(2, 5)};
  Index comparisons = 0;
  Index mismatches = 0;
  Index closed_form_checks = 0;
  Index closed_form_failures = 0;

  for (Index n = 1; n <= n_max; ++n) {
    for (Index g = 0; g <= n; ++g) {
      for (Index c = 1; c <= n; ++c) {
        for (const auto& delta : deltas) {
          const auto counts = enumerate_subsets(n, g, c, delta);
          const Rational p_g = prob_good_majority(n, g, c, delta);
          ++comparisons;
          if (p_g != Rational(counts.majority, counts.total)) ++mismatches;
          if (g >= 1 && counts.majority > 0) {
            // P{0 in S | majority} over subsets, rescaled against the formula.
            const Rational p_in = prob_in_good_sample(n, g, c, delta);
            ++comparisons;
            if (p_in != Rational(counts.majority_with_fixed, counts.majority)) ++mismatches;
          }

          // closed forms from the hypergeometric special cases
          if (c == 1) {
            ++closed_form_checks;
            if (p_g != Rational(g, n)) ++closed_form_failures;
            if (g >= 1) {
              ++closed_form_checks;
              if (prob_in_good_sample(n, g, c, delta) != Rational(1, g))
                ++closed_form_failures;
            }
          }
          if (c == 2 && n >= 2) {
            ++closed_form_checks;
            if (p_g != Rational(g * (g - 1), n * (n - 1))) ++closed_form_failures;
            if (g >= 2) {
              ++closed_form_checks;
              if (prob_in_good_sample(n, g, c, delta) != Rational(2, g))
                ++closed_form_failures;
            }
          }
          if (c == n) {
            ++closed_form_checks;
            const Rational expected = g >= majority_threshold(n, delta) ? 1 : 0;
            if (p_g != expected) ++closed_form_failures;
            if (g >= 1 && expected == 1) {
              ++closed_form_checks;
              if (prob_in_good_sample(n, g, c, delta) != 1) ++closed_form_failures;
            }
          }
        }
      }
    }
  }

  std::vector<CheckResult> checks;
  checks.push_back({"formulas vs exhaustive enumeration", mismatches == 0,
                    static_cast<double>(mismatches), 0.0,
                    std::to_string(comparisons) + " exact comparisons, n <= " +
                        std::to_string(n_max)});
  checks.push_back({"closed forms C=1, C=2, C=n", closed_form_failures == 0,
                    static_cast<double>(closed_form_failures), 0.0,
                    std::to_string(closed_form_checks) + " exact comparisons"});
  return checks;
}

}  // namespace

std::vector<CheckResult> verify_suite(const std::string& name, Index trials,
                                      std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("verify_suite: trials >= 1");
  if (name == "compressors") return verify_compressors(trials, seed);
  if (name == "aggregators") return verify_aggregators(trials, seed);
  if (name == "clipping_lemma") return verify_clipping_lemma(trials, seed);
  if (name == "probabilities") return verify_probabilities(std::min<Index>(trials, 12));
  throw std::invalid_argument("verify_suite: unknown suite '" + name + "'");
}

}  // namespace byzsim
