// Command-line front end: run experiments, sweep stepsizes and clip
// multipliers, evaluate the participation probabilities, solve for reference
// optima, and run the built-in verification suites.

#include "byzsim/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

byzsim::ExperimentConfig load_config(const std::string& path,
                                     const std::vector<std::string>& overrides) {
  auto kv = byzsim::KeyValueConfig::parse_file(path);
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--set expects key=value, got '" + item + "'");
    kv.set(item.substr(0, eq), item.substr(eq + 1));
  }
  return byzsim::ExperimentConfig::from_kv(kv);
}

void print_summary(const byzsim::ExperimentResult& result) {
  for (const auto& run : result.runs) {
    std::printf("seed %llu: final gap %.6g, grad^2 %.6g, epochs %.3f, rounds %lld\n",
                static_cast<unsigned long long>(run.seed), run.final_gap, run.final_grad_sq,
                run.epochs, static_cast<long long>(run.rounds));
  }
  std::printf("final gap mean %.6g, stderr %.6g (f* = %.12g)\n", result.final_gap_mean,
              result.final_gap_stderr, result.f_star);
  if (!result.csv_path.empty())
    std::printf("wrote %s and %s\n", result.csv_path.c_str(), result.summary_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-robust distributed optimization simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  auto* run_cmd = app.add_subcommand("run", "run the configured experiment");
  run_cmd->add_option("config", config_path, "experiment config file")->required();
  run_cmd->add_option("--set", overrides, "override a config key: --set key=value");

  auto* sweep_cmd = app.add_subcommand("sweep", "grid sweep of gamma and clip multiplier");
  sweep_cmd->add_option("config", config_path, "experiment config file")->required();
  sweep_cmd->add_option("--set", overrides, "override a config key: --set key=value");
  std::vector<double> sweep_gammas{0.1, 0.01, 0.001};
  std::vector<double> sweep_alphas{0.1, 1.0, 10.0};
  sweep_cmd->add_option("--gammas", sweep_gammas, "stepsize candidates");
  sweep_cmd->add_option("--alphas", sweep_alphas, "clip multiplier candidates");

  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  std::string suite;
  byzsim::Index trials = 0;
  std::uint64_t verify_seed = 1;
  verify_cmd
      ->add_option("suite", suite,
                   "one of: compressors, aggregators, clipping_lemma, probabilities")
      ->required();
  verify_cmd->add_option("--trials", trials, "draw count (0 picks the suite default)");
  verify_cmd->add_option("--seed", verify_seed, "Monte-Carlo seed");

  auto* probs_cmd = app.add_subcommand("probs", "participation probabilities");
  byzsim::Index probs_n = 0, probs_g = 0, probs_c = 0;
  std::string probs_delta = "0.25";
  probs_cmd->add_option("--n", probs_n, "total clients")->required();
  probs_cmd->add_option("--g", probs_g, "good clients")->required();
  probs_cmd->add_option("--c", probs_c, "cohort size")->required();
  probs_cmd->add_option("--delta", probs_delta, "Byzantine bound, decimal or p/q");

  auto* solve_cmd = app.add_subcommand("solve", "reference optimum for the configured problem");
  solve_cmd->add_option("config", config_path, "experiment config file")->required();
  solve_cmd->add_option("--set", overrides, "override a config key: --set key=value");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const auto result = byzsim::run_experiment(load_config(config_path, overrides));
      print_summary(result);
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const auto cfg = load_config(config_path, overrides);
      const auto sweep = byzsim::sweep_experiment(cfg, sweep_gammas, sweep_alphas);
      for (const auto& entry : sweep.entries)
        std::printf("gamma %-8g alpha %-8g median final gap %.6g\n", entry.gamma, entry.alpha,
                    entry.median_final_gap);
      std::printf("best: gamma %g alpha %g (median final gap %.6g)\n", sweep.best.gamma,
                  sweep.best.alpha, sweep.best.median_final_gap);
      return 0;
    }
    if (verify_cmd->parsed()) {
      if (trials == 0) {
        if (suite == "compressors") trials = 100000;
        else if (suite == "aggregators") trials = 10000;
        else if (suite == "clipping_lemma") trials = 1000000;
        else trials = 12;  // probabilities: n_max
      }
      const auto checks = byzsim::verify_suite(suite, trials, verify_seed);
      const bool ok = byzsim::report_checks(checks, std::cout);
      return ok ? 0 : 1;
    }
    if (probs_cmd->parsed()) {
      const auto delta = byzsim::rational_from_string(probs_delta);
      const auto p_g = byzsim::prob_good_majority(probs_n, probs_g, probs_c, delta);
      std::printf("p_G           = %s = %.17g\n", p_g.str().c_str(), byzsim::to_double(p_g));
      if (probs_g >= 1 && p_g != 0) {
        const auto p_in = byzsim::prob_in_good_sample(probs_n, probs_g, probs_c, delta);
        std::printf("P{i in G_C^k} = %s = %.17g\n", p_in.str().c_str(),
                    byzsim::to_double(p_in));
      } else {
        std::printf("P{i in G_C^k} undefined: conditioning event has probability zero\n");
      }
      return 0;
    }
    if (solve_cmd->parsed()) {
      const auto cfg = load_config(config_path, overrides);
      const auto world = byzsim::build_world(cfg);
      const byzsim::FederatedObjective objective(world);
      const auto ref = byzsim::reference_solution(objective, 1e-10);
      std::printf("f* = %.17g (grad norm %.3g, %lld iterations)\n", ref.f_star, ref.grad_norm,
                  static_cast<long long>(ref.iterations));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
