#pragma once

#include "byzsim/algorithms.hpp"
#include "byzsim/config.hpp"
#include "byzsim/metrics.hpp"
#include "byzsim/world.hpp"

#include <optional>
#include <string>
#include <vector>

namespace byzsim {

enum class Method { MarinaPp, MomentumHeuristic, ReferenceGd };

/// Fully validated experiment description. Built from a KeyValueConfig; see
/// the README for the key grammar.
struct ExperimentConfig {
  // problem
  std::string objective_kind = "logistic";  // logistic | quadratic
  std::string dataset_path;                 // empty: synthetic
  Index synthetic_samples = 1000;
  Index synthetic_dimension = 20;
  std::uint64_t synthetic_seed = 1;
  double eta = 0.01;
  SplitMode split = SplitMode::Homogeneous;
  Index quadratic_dimension = 2;
  double quadratic_condition = 10.0;

  // federation
  Index clients = 1;
  Index byzantine = 0;
  AttackSpec attack;
  Rational delta = 0;

  // algorithm
  Method method = Method::MarinaPp;
  double gamma = 0.01;
  Index minibatch = 32;
  double p = 1.0;
  double alpha = kInfinity;
  Index cohort = 1;
  Index refresh_cohort = 1;
  Index rounds = 100;
  double epoch_budget = kInfinity;  // stop once cumulative epochs exceed this
  double beta = 0.9;
  AggregatorSpec aggregator;
  CompressorSpec compressor;  // dimension 0: filled from the problem

  std::vector<std::uint64_t> seeds{1};
  std::string output_stem;  // empty: no files written
  std::string config_hash;

  static ExperimentConfig from_kv(const KeyValueConfig& kv);
};

struct RunSummary {
  std::uint64_t seed = 0;
  double final_gap = 0.0;
  double final_grad_sq = 0.0;
  double epochs = 0.0;
  Index rounds = 0;
  std::int64_t wall_ns = 0;
};

struct ExperimentResult {
  MetricsTable table;
  std::vector<RunSummary> runs;
  double f_star = 0.0;
  double final_gap_mean = 0.0;
  double final_gap_stderr = 0.0;
  std::string csv_path;
  std::string summary_path;
};

/// Builds the federation for a config; the synthetic dataset and splits use
/// the configured generation seed, independent of the run seeds.
WorldSpec build_world(const ExperimentConfig& cfg);

/// Runs the configured method once per seed, computing f* once via the
/// reference solver and sharing it across seeds. Writes the CSV and the
/// JSON-lines summary next to output_stem when set.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SweepEntry {
  double gamma = 0.0;
  double alpha = 0.0;
  double median_final_gap = 0.0;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  SweepEntry best;
};

/// Grid sweep over stepsizes and clip multipliers; picks the candidate with
/// the smallest median final gap across seeds.
SweepResult sweep_experiment(const ExperimentConfig& cfg, const std::vector<double>& gammas,
                             const std::vector<double>& alphas);

struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

/// Monte-Carlo / enumeration verification suites. Names: compressors,
/// aggregators, clipping_lemma, probabilities.
std::vector<CheckResult> verify_suite(const std::string& name, Index trials,
                                      std::uint64_t seed);

/// Prints one line per check; returns true when everything passed.
bool report_checks(const std::vector<CheckResult>& checks, std::ostream& out);

}  // namespace byzsim
