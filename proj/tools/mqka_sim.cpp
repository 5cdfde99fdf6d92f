#include <CLI11.hpp>

#include <iostream>
#include <thread>

#include "mqka/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Authenticated multiparty quantum key agreement simulator"};
  app.require_subcommand(1);

  mqka::cli::RunOptions run;
  std::uint64_t run_seed = 0;
  std::size_t run_trials = 0;
  auto* run_cmd = app.add_subcommand("run", "Run one or more sessions from a scenario file");
  run_cmd->add_option("--config", run.config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "Override the master seed");
  auto* trials_opt = run_cmd->add_option("--trials", run_trials, "Override the trial count")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run.out_path, "Write the JSON report here (default: stdout)");
  run_cmd->add_option("--csv", run.csv_path, "Also write a one-row summary CSV here");
  run_cmd->add_flag("--per-trial", run.per_trial, "Include per-trial records");
  run_cmd->add_option("--threads", run.threads, "Worker threads (0 = hardware concurrency)");

  std::string example_out;
  auto* replay_cmd = app.add_subcommand("replay-example", "Replay and verify the three-party worked example");
  replay_cmd->add_option("--out", example_out, "Write the JSON trace here");

  std::size_t dim = 0, families = 0;
  std::uint64_t usd_seed = 0;
  auto* usd_cmd = app.add_subcommand("usd-check", "Check linear dependence of entangle-measure ancilla families");
  usd_cmd->add_option("--dim", dim, "Ancilla dimension d")->required();
  usd_cmd->add_option("--families", families, "Number of random families")->required();
  usd_cmd->add_option("--seed", usd_seed, "Seed")->required();

  std::size_t parties = 0, states = 1;
  double delta = 0.0;
  auto* eff_cmd = app.add_subcommand("efficiency", "Print the particle efficiency (2 - delta) / (3N)");
  eff_cmd->add_option("--parties", parties, "Participants N")->required();
  eff_cmd->add_option("--delta", delta, "Detection fraction")->required();
  eff_cmd->add_option("--states", states, "Carriers per sequence n for the component counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mqka::cli::kExitUsage;
  }

  if (*run_cmd) {
    if (*seed_opt) run.seed = run_seed;
    if (*trials_opt) run.trials = run_trials;
    if (run.threads == 0) run.threads = std::max(1u, std::thread::hardware_concurrency());
    return mqka::cli::cmd_run(run, std::cout, std::cerr);
  }
  if (*replay_cmd) return mqka::cli::cmd_replay_example(example_out, std::cout, std::cerr);
  if (*usd_cmd) return mqka::cli::cmd_usd_check(dim, families, usd_seed, std::cout, std::cerr);
  if (*eff_cmd) return mqka::cli::cmd_efficiency(parties, delta, states, std::cout, std::cerr);
  return mqka::cli::kExitUsage;
}
