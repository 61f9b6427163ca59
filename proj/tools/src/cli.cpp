#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ddchain/cli.hpp"
#include "ddchain/errors.hpp"

namespace ddchain::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kidney exchange with deceased-donor-initiated chains", "ddchain"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  GenPoolArgs gen;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("gen-pool", "Generate a random registry snapshot");
  gen_cmd->add_option("--config", gen.config_path, "Pool config JSON")->check(CLI::ExistingFile);
  auto* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "Override the config seed");
  gen_cmd->add_option("--out", gen.out_path, "Snapshot JSON to write")->required();

  SolveArgs solve;
  std::uint64_t solve_seed = 0;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one registry snapshot");
  solve_cmd->add_option("snapshot,--config", solve.snapshot_path, "Registry snapshot JSON")
      ->required()
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--k", solve.k, "Maximum exchange length")->capture_default_str();
  solve_cmd->add_option("--backend", solve.backend, "Solver backend")
      ->check(CLI::IsMember({"compact", "packing"}))
      ->capture_default_str();
  solve_cmd->add_flag("--cross-check", solve.cross_check, "Run both backends and compare objectives");
  solve_cmd->add_flag("--require-wl-terminus", solve.require_wl_terminus, "Chains must end at a wait-list patient");
  solve_cmd->add_flag("--dump-lp", solve.dump_lp, "Write the compact formulation next to the plan");
  solve_cmd->add_option("--out", solve.out_path, "Plan JSON to write");
  auto* solve_seed_opt = solve_cmd->add_option("--seed", solve_seed, "Recorded in the manifest");

  SimulateArgs sim;
  std::uint64_t sim_seed = 0;
  int sim_k = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the scenario grid for both allocation policies");
  sim_cmd->add_option("--config", sim.config_path, "Scenario config JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", sim.out_dir, "Result directory")->required();
  auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed, "Override rng_seed");
  auto* sim_k_opt = sim_cmd->add_option("--k", sim_k, "Override k");
  sim_cmd->add_flag("--require-wl-terminus", sim.require_wl_terminus, "Chains must end at a wait-list patient");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Build side-by-side tables from a simulate result directory");
  report_cmd->add_option("result_dir,--config", report.result_dir, "Directory written by simulate")->required();
  report_cmd->add_option("--out", report.out_dir, "Table directory (default <result_dir>/report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*gen_cmd) {
      if (*gen_seed_opt) gen.seed = gen_seed;
      cmd_gen_pool(gen, out);
    } else if (*solve_cmd) {
      if (*solve_seed_opt) solve.seed = solve_seed;
      cmd_solve(solve, out);
    } else if (*sim_cmd) {
      if (*sim_seed_opt) sim.seed = sim_seed;
      if (*sim_k_opt) sim.k = sim_k;
      cmd_simulate(sim, out);
    } else if (*report_cmd) {
      cmd_report(report, out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const Interrupted& e) {
    err << e.what() << "\n";
    return kExitInterrupted;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitOk;
}

}  // namespace ddchain::cli
