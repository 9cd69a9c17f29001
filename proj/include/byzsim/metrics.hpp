#pragma once

#include "byzsim/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace byzsim {

/// Per-round record of a run. Row k describes iterate x^k together with the
/// randomness of the round that produced it (row 0 carries the estimator
/// initialisation round). wall_ns is in-memory only: the CSV must be
/// byte-stable across reruns of the same seed.
struct RoundMetrics {
  Index k = 0;
  double f_gap = 0.0;    // f(x^k) - f*, NaN when f* is unknown
  double grad_sq = 0.0;  // ||grad f(x^k)||^2
  int c_k = 0;
  Index good_sampled = 0;
  Index byz_sampled = 0;
  Index clip_activations = 0;  // messages with norm above the round's clip level
  Index coords_sent = 0;       // transmitted-coordinate communication proxy
  double epochs = 0.0;         // cumulative component-gradient epochs
  std::int64_t wall_ns = 0;
};

/// One table row per (seed, round).
struct MetricsTable {
  std::vector<std::uint64_t> seeds;                 // parallel to trajectories
  std::vector<std::vector<RoundMetrics>> trajectories;
};

/// Header plus one row per (seed, round), floats at 17 significant digits,
/// LF line endings.
void emit_csv(const MetricsTable& table, std::ostream& out);
void emit_csv_file(const MetricsTable& table, const std::string& path);

MetricsTable parse_metrics_csv(std::istream& in);

}  // namespace byzsim
