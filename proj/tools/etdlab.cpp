// etdlab command line: oracle tables, experiment sweeps, key-matrix
// analysis and bounce detection.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "etdlab/config.hpp"
#include "etdlab/errors.hpp"
#include "etdlab/harness.hpp"
#include "etdlab/oracle.hpp"
#include "etdlab/policies.hpp"
#include "etdlab/stability.hpp"
#include "etdlab/text.hpp"

namespace {

using namespace etdlab;

int cmd_oracle(std::uint64_t steps, std::uint64_t sample, std::uint64_t rollouts, std::uint64_t seed,
               double epsilon, const std::string& out) {
  const auto behavior = epsilon > 0.0 ? policies::PolicyKind::behavior(epsilon) : policies::PolicyKind::target();
  Rng rng(seed);
  const auto states = oracle::collect_states(steps, sample, behavior, rng);
  auto table = oracle::estimate_true_values(states, rollouts, seed);
  table.provenance.total_steps = steps;
  table.provenance.epsilon = epsilon;
  oracle::save_table(table, out);

  std::size_t capped = 0;
  for (const auto& e : table.entries) capped += e.capped_rollouts;
  std::cout << "wrote " << table.entries.size() << " states to " << out << "\n";
  if (capped > 0)
    std::cerr << "warning: " << capped << " rollouts hit the " << oracle::kRolloutStepCap << "-step cap\n";
  return 0;
}

int cmd_run(const std::string& config, bool serial, bool dump) {
  const auto cfg = harness::load_config(config);
  const auto result = harness::run_experiment(cfg, {serial ? Execution::Serial : Execution::Parallel, dump});
  std::cout << "method=" << harness::to_string(cfg.method) << " mode=" << harness::to_string(cfg.mode) << "\n";
  for (const auto& row : result.study) {
    std::cout << "alpha=" << text::format_double(row.alpha) << " tail_msve="
              << (row.mean_tail_msve ? text::format_double(*row.mean_tail_msve) : std::string("n/a"))
              << " diverged_runs=" << row.diverged_runs << "\n";
  }
  std::cout << "outputs in " << cfg.output_dir.string() << "\n";
  return 0;
}

int cmd_analyze(const std::string& chain, const std::string& builtin) {
  stability::FiniteMRP mrp;
  if (!builtin.empty()) {
    if (builtin != "counterexample") throw ConfigError("unknown builtin '" + builtin + "'");
    mrp = stability::counterexample();
  } else {
    mrp = stability::load_chain(chain);
  }
  const auto report = stability::key_matrix(mrp);
  std::cout << stability::format_report(report);
  return 0;
}

int cmd_bounce(const std::string& curve, double tail_fraction) {
  std::ifstream in(curve);
  if (!in) throw ConfigError("cannot open " + curve);
  std::cout << "alpha,min_error,final_error,bounce\n";
  for (const auto& [alpha, series] : harness::read_learning_curve(in)) {
    const auto r = harness::detect_bounce(series, tail_fraction);
    std::cout << text::format_double(alpha) << ',';
    if (!r.applicable) {
      std::cout << ",,n/a\n";
      continue;
    }
    std::cout << text::format_double(r.min_error) << ',' << text::format_double(r.final_error) << ','
              << (r.bounce ? "true" : "false") << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TD(0) / emphatic TD(0) prediction lab"};
  app.require_subcommand(1);

  std::uint64_t steps = 0, sample = 0, rollouts = 0, seed = 0;
  double epsilon = 0.0;
  std::string out;
  auto* oracle_cmd = app.add_subcommand("oracle", "Sample states and estimate v_pi by Monte-Carlo rollouts");
  oracle_cmd->add_option("--steps", steps, "Behavior-policy steps to simulate")->required();
  oracle_cmd->add_option("--sample", sample, "States sampled from the second half")->required();
  oracle_cmd->add_option("--rollouts", rollouts, "Target-policy rollouts per state")->required();
  oracle_cmd->add_option("--seed", seed, "Random seed")->required();
  oracle_cmd->add_option("--epsilon", epsilon, "Behavior epsilon for state collection (0 = target policy)")
      ->check(CLI::Range(0.0, 1.0));
  oracle_cmd->add_option("--out", out, "Output table (CSV)")->required();

  std::string config;
  bool serial = false, dump = false;
  auto* run_cmd = app.add_subcommand("run", "Run a step-size sweep from a config file");
  run_cmd->add_option("--config", config, "key = value experiment config")->required()->check(CLI::ExistingFile);
  run_cmd->add_flag("--serial", serial, "Use the serial reference path instead of OpenMP");
  run_cmd->add_flag("--dump-runs", dump, "Also write per-run MSVE series to runs.csv");

  std::string chain, builtin;
  auto* analyze_cmd = app.add_subcommand("analyze", "TD(lambda) key-matrix stability analysis");
  auto* chain_opt = analyze_cmd->add_option("--chain", chain, "Chain specification file")->check(CLI::ExistingFile);
  auto* builtin_opt = analyze_cmd->add_option("--builtin", builtin, "Built-in chain (counterexample)");
  chain_opt->excludes(builtin_opt);
  analyze_cmd->require_option(1);

  std::string curve;
  double tail_fraction = 0.01;
  auto* bounce_cmd = app.add_subcommand("bounce", "Detect the bounce pattern in a learning_curve.csv");
  bounce_cmd->add_option("--curve", curve, "learning_curve.csv")->required()->check(CLI::ExistingFile);
  bounce_cmd->add_option("--tail-fraction", tail_fraction, "Tail window as a fraction of the curve")
      ->check(CLI::Range(1e-9, 1.0));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*oracle_cmd) return cmd_oracle(steps, sample, rollouts, seed, epsilon, out);
    if (*run_cmd) return cmd_run(config, serial, dump);
    if (*analyze_cmd) return cmd_analyze(chain, builtin);
    if (*bounce_cmd) return cmd_bounce(curve, tail_fraction);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
