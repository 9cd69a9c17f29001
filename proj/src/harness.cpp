#include "byzsim/harness.hpp"

#include "byzsim/numerics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace byzsim {

namespace {

AttackKind attack_from_name(const std::string& name) {
  if (name == "none") return AttackKind::None;
  if (name == "bit_flipping") return AttackKind::BitFlipping;
  if (name == "label_flipping") return AttackKind::LabelFlipping;
  if (name == "alie") return AttackKind::Alie;
  if (name == "shift_back") return AttackKind::ShiftBack;
  throw std::runtime_error("config: unknown attack '" + name + "'");
}

AggregationRule rule_from_name(const std::string& name) {
  if (name == "mean") return AggregationRule::Mean;
  if (name == "coordinate_median") return AggregationRule::CoordinateMedian;
  if (name == "geometric_median") return AggregationRule::GeometricMedian;
  if (name == "krum") return AggregationRule::Krum;
  if (name == "trimmed_mean") return AggregationRule::TrimmedMean;
  throw std::runtime_error("config: unknown aggregator rule '" + name + "'");
}

CompressorKind compressor_from_name(const std::string& name) {
  if (name == "identity") return CompressorKind::Identity;
  if (name == "rand_k") return CompressorKind::RandK;
  if (name == "l2_quantization") return CompressorKind::L2Quantization;
  throw std::runtime_error("config: unknown compressor '" + name + "'");
}

Method method_from_name(const std::string& name) {
  if (name == "marina_pp") return Method::MarinaPp;
  if (name == "momentum_heuristic") return Method::MomentumHeuristic;
  if (name == "reference_gd") return Method::ReferenceGd;
  throw std::runtime_error("config: unknown method '" + name + "'");
}

std::string resolve_output_stem(const std::string& stem) {
  if (stem.empty()) return stem;
  const char* override_dir = std::getenv("BYZSIM_OUTPUT_DIR");
  if (override_dir == nullptr || *override_dir == '\0') return stem;
  const std::filesystem::path p(stem);
  return (std::filesystem::path(override_dir) / p.filename()).string();
}

std::vector<RoundMetrics> run_reference_gd(const ExperimentConfig& cfg, const WorldSpec& world,
                                           double f_star) {
  const FederatedObjective objective(world);
  const double step = 1.0 / objective.smoothness().l_bound;
  double per_iter_evals = 0.0;
  for (const Index i : world.assignment.good)
    per_iter_evals +=
        static_cast<double>(world.objectives[static_cast<std::size_t>(i)]->sample_count());
  double denom = 0.0;
  for (const auto& obj : world.objectives) denom += static_cast<double>(obj->sample_count());

  Vector x = Vector::Zero(world.dimension());
  std::vector<RoundMetrics> rows;
  double evals = 0.0;
  for (Index k = 0; k <= cfg.rounds; ++k) {
    RoundMetrics row;
    row.k = k;
    row.f_gap = objective.value(x) - f_star;
    const Vector g = objective.gradient(x);
    row.grad_sq = g.squaredNorm();
    row.c_k = 1;
    row.good_sampled = world.good_count();
    row.byz_sampled = 0;
    row.coords_sent = world.good_count() * world.dimension();
    row.epochs = evals / denom;
    rows.push_back(row);
    if (k == cfg.rounds || row.epochs >= cfg.epoch_budget) break;
    x -= step * g;
    evals += per_iter_evals;
  }
  return rows;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
  ExperimentConfig cfg;
  cfg.config_hash = kv.hash();

  cfg.objective_kind = kv.get_string("problem.kind", "logistic");
  if (cfg.objective_kind != "logistic" && cfg.objective_kind != "quadratic")
    throw std::runtime_error("config: problem.kind must be logistic or quadratic");
  cfg.dataset_path = kv.get_string("problem.dataset", "");
  cfg.synthetic_samples = kv.get_index("problem.synthetic.samples", 1000);
  cfg.synthetic_dimension = kv.get_index("problem.synthetic.features", 20);
  cfg.synthetic_seed =
      static_cast<std::uint64_t>(kv.get_index("problem.synthetic.seed", 1));
  cfg.eta = kv.get_double("problem.eta", 0.01);
  const std::string split = kv.get_string("problem.split", "homogeneous");
  if (split == "homogeneous") {
    cfg.split = SplitMode::Homogeneous;
  } else if (split == "label_sorted") {
    cfg.split = SplitMode::LabelSortedHeterogeneous;
  } else {
    throw std::runtime_error("config: problem.split must be homogeneous or label_sorted");
  }
  cfg.quadratic_dimension = kv.get_index("problem.quadratic.dimension", 2);
  cfg.quadratic_condition = kv.get_double("problem.quadratic.condition", 10.0);

  cfg.clients = kv.get_index("federation.clients", 1);
  cfg.byzantine = kv.get_index("federation.byzantine", 0);
  cfg.attack.kind = attack_from_name(kv.get_string("federation.attack", "none"));
  cfg.attack.alie_z = kv.get_double("federation.alie_z", 1.0);
  if (kv.has("federation.delta")) {
    cfg.delta = kv.get_rational("federation.delta");
  } else {
    cfg.delta = Rational(cfg.byzantine, cfg.clients);
  }

  cfg.method = method_from_name(kv.get_string("algorithm.method", "marina_pp"));
  cfg.gamma = kv.get_double("algorithm.gamma", 0.01);
  cfg.minibatch = kv.get_index("algorithm.b", 32);
  cfg.p = kv.get_double("algorithm.p", 1.0);
  cfg.alpha = kv.get_double("algorithm.alpha", kInfinity);
  cfg.cohort = kv.get_index("algorithm.c", cfg.clients);
  cfg.refresh_cohort = kv.get_index("algorithm.c_hat", cfg.clients);
  cfg.rounds = kv.get_index("algorithm.rounds", 100);
  cfg.epoch_budget = kv.get_double("algorithm.epoch_budget", kInfinity);
  cfg.beta = kv.get_double("algorithm.beta", 0.9);

  cfg.aggregator.rule = rule_from_name(kv.get_string("aggregator.rule", "mean"));
  cfg.aggregator.bucket_size = kv.get_index("aggregator.bucket_size", 1);
  cfg.aggregator.trim_fraction = kv.get_double("aggregator.trim_fraction", 0.1);
  cfg.aggregator.krum_assumed_byzantine = kv.get_index("aggregator.krum_b", -1);
  cfg.aggregator.gm_max_iters = kv.get_index("aggregator.gm_max_iters", 100);
  cfg.aggregator.gm_tol = kv.get_double("aggregator.gm_tol", 1e-10);
  cfg.aggregator.delta = cfg.delta;
  cfg.aggregator.validate();

  cfg.compressor.kind = compressor_from_name(kv.get_string("compressor.kind", "identity"));
  cfg.compressor.k = kv.get_index("compressor.k", 1);
  cfg.compressor.dimension = 0;  // filled from the problem

  if (kv.has("seeds")) cfg.seeds = kv.get_seed_list("seeds");
  cfg.output_stem = kv.get_string("output", "");

  if (cfg.clients < 1 || cfg.byzantine < 0 || 2 * cfg.byzantine >= cfg.clients)
    throw std::runtime_error("config: need byzantine < clients / 2");
  if (!cfg.dataset_path.empty() && !std::filesystem::exists(cfg.dataset_path))
    throw std::runtime_error("config: dataset file '" + cfg.dataset_path + "' does not exist");
  return cfg;
}

WorldSpec build_world(const ExperimentConfig& cfg) {
  if (cfg.objective_kind == "quadratic") {
    const Index d = cfg.quadratic_dimension;
    if (d < 1 || cfg.quadratic_condition < 1.0)
      throw std::runtime_error("config: bad quadratic problem");
    Matrix a = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
      a(i, i) = d == 1 ? 1.0
                       : 1.0 + (cfg.quadratic_condition - 1.0) * static_cast<double>(i) /
                                   static_cast<double>(d - 1);
    }
    const Vector b = Vector::Ones(d);
    return make_quadratic_world(a, b, cfg.clients, cfg.byzantine, cfg.attack, cfg.delta);
  }

  std::shared_ptr<const Dataset> ds;
  if (cfg.dataset_path.empty()) {
    RngStream lane(cfg.synthetic_seed, 0, kServerLane, Purpose::DataGen);
    ds = std::make_shared<Dataset>(
        synthetic_dataset(cfg.synthetic_samples, cfg.synthetic_dimension, lane));
  } else {
    ds = std::make_shared<Dataset>(parse_libsvm_file(cfg.dataset_path));
  }
  RngStream split_lane(cfg.synthetic_seed, 0, kServerLane, Purpose::Init);
  const auto assignment = split_clients(ds, cfg.clients, cfg.byzantine, cfg.split, split_lane);
  return make_logistic_world(assignment, cfg.eta, cfg.attack, cfg.delta);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const WorldSpec world = build_world(cfg);
  const FederatedObjective objective(world);
  const auto reference = reference_solution(objective, 1e-10);

  ExperimentResult result;
  result.f_star = reference.f_star;

  for (const auto seed : cfg.seeds) {
    const auto start = Clock::now();
    std::vector<RoundMetrics> rows;
    switch (cfg.method) {
      case Method::MarinaPp: {
        MarinaPpConfig mc;
        mc.gamma = cfg.gamma;
        mc.minibatch = cfg.minibatch;
        mc.p = cfg.p;
        mc.alpha = cfg.alpha;
        mc.cohort = cfg.cohort;
        mc.refresh_cohort = cfg.refresh_cohort;
        mc.rounds = cfg.rounds;
        mc.epoch_budget = cfg.epoch_budget;
        mc.aggregator = cfg.aggregator;
        mc.compressor = cfg.compressor;
        if (mc.compressor.dimension == 0) mc.compressor.dimension = world.dimension();
        mc.delta = cfg.delta;
        rows = run_marina_pp(mc, world, seed, reference.f_star);
        break;
      }
      case Method::MomentumHeuristic: {
        MomentumHeuristicConfig hc;
        hc.gamma = cfg.gamma;
        hc.beta = cfg.beta;
        hc.alpha = cfg.alpha;
        hc.cohort = cfg.cohort;
        hc.minibatch = cfg.minibatch;
        hc.rounds = cfg.rounds;
        hc.epoch_budget = cfg.epoch_budget;
        hc.aggregator = cfg.aggregator;
        hc.delta = cfg.delta;
        rows = run_momentum_heuristic(hc, world, seed, reference.f_star);
        break;
      }
      case Method::ReferenceGd:
        rows = run_reference_gd(cfg, world, reference.f_star);
        break;
    }
    const auto wall =
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();

    RunSummary summary;
    summary.seed = seed;
    summary.wall_ns = wall;
    if (!rows.empty()) {
      summary.final_gap = rows.back().f_gap;
      summary.final_grad_sq = rows.back().grad_sq;
      summary.epochs = rows.back().epochs;
      summary.rounds = rows.back().k;
    }
    result.runs.push_back(summary);
    result.table.seeds.push_back(seed);
    result.table.trajectories.push_back(std::move(rows));
  }

  NeumaierSum gap_sum;
  for (const auto& run : result.runs) gap_sum.add(run.final_gap);
  const auto count = static_cast<double>(result.runs.size());
  result.final_gap_mean = gap_sum.value() / count;
  if (result.runs.size() > 1) {
    NeumaierSum sq;
    for (const auto& run : result.runs) {
      const double d = run.final_gap - result.final_gap_mean;
      sq.add(d * d);
    }
    result.final_gap_stderr = std::sqrt(sq.value() / (count - 1.0)) / std::sqrt(count);
  }

  const std::string stem = resolve_output_stem(cfg.output_stem);
  if (!stem.empty()) {
    const std::filesystem::path path(stem);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    result.csv_path = stem + ".csv";
    emit_csv_file(result.table, result.csv_path);

    result.summary_path = stem + ".jsonl";
    std::ofstream out(result.summary_path, std::ios::binary);
    if (!out) throw std::runtime_error("run_experiment: cannot open '" + result.summary_path + "'");
    for (const auto& run : result.runs) {
      nlohmann::json j{{"config_hash", cfg.config_hash}, {"seed", run.seed},
                       {"rounds", run.rounds},           {"final_gap", run.final_gap},
                       {"final_grad_sq", run.final_grad_sq}, {"epochs", run.epochs},
                       {"f_star", result.f_star},        {"wall_ns", run.wall_ns}};
      out << j.dump() << '\n';
    }
    nlohmann::json tail{{"config_hash", cfg.config_hash},
                        {"seeds", result.runs.size()},
                        {"final_gap_mean", result.final_gap_mean},
                        {"final_gap_stderr", result.final_gap_stderr}};
    out << tail.dump() << '\n';
  }
  return result;
}

SweepResult sweep_experiment(const ExperimentConfig& cfg, const std::vector<double>& gammas,
                             const std::vector<double>& alphas) {
  if (gammas.empty() || alphas.empty())
    throw std::invalid_argument("sweep_experiment: empty grid");
  SweepResult result;
  for (const double gamma : gammas) {
    for (const double alpha : alphas) {
      ExperimentConfig candidate = cfg;
      candidate.gamma = gamma;
      candidate.alpha = alpha;
      candidate.output_stem.clear();
      const auto outcome = run_experiment(candidate);
      std::vector<double> gaps;
      for (const auto& run : outcome.runs) gaps.push_back(run.final_gap);
      std::sort(gaps.begin(), gaps.end());
      const double median = gaps[gaps.size() / 2];
      result.entries.push_back({gamma, alpha, median});
    }
  }
  result.best = *std::min_element(
      result.entries.begin(), result.entries.end(),
      [](const SweepEntry& a, const SweepEntry& b) {
        const bool a_ok = std::isfinite(a.median_final_gap);
        const bool b_ok = std::isfinite(b.median_final_gap);
        if (a_ok != b_ok) return a_ok;
        return a.median_final_gap < b.median_final_gap;
      });
  return result;
}

bool report_checks(const std::vector<CheckResult>& checks, std::ostream& out) {
  bool all_pass = true;
  for (const auto& check : checks) {
    out << (check.pass ? "[ok]   " : "[FAIL] ") << check.name << ": observed "
        << check.observed << " vs bound " << check.bound;
    if (!check.detail.empty()) out << "  (" << check.detail << ")";
    out << '\n';
    all_pass = all_pass && check.pass;
  }
  return all_pass;
}

}  // namespace byzsim
