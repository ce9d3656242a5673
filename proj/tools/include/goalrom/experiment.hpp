#pragma once

// Pipelines behind the command-line subcommands. Each writes CSV files into
// the configured output directory (created on demand) plus a run_meta.txt
// sidecar holding timestamps and wall times, the only nondeterministic output.

#include <iosfwd>
#include <optional>
#include <string>

#include "goalrom/config.hpp"

namespace goalrom {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitBudget = 4,
};

/// Fixed-basis study: adaptive ROM run for the basis, ECSW meshes for both
/// training modes at each configured tolerance, then ROM and HROM errors at
/// verify.b, at the ROM points and on the validation lattice (verify_table.csv).
void cmd_verify(const ExperimentConfig& config, std::ostream& log);

/// Adaptive run in config.sampler.mode (the greedy mode forwards to cmd_greedy).
void cmd_adapt(const ExperimentConfig& config, std::ostream& log);

/// Residual-norm baseline with a work budget taken from greedy.work_budget,
/// else from the run in greedy.budget_from, else from a goal-oriented run in
/// greedy.reference_mode written to <out>/reference.
void cmd_greedy(const ExperimentConfig& config, std::ostream& log);

/// Rebuilds work_<mode>.csv from the cycles.csv of the output directory.
void cmd_work(const ExperimentConfig& config, std::ostream& log);

/// Total work units recorded by a finished run directory.
double run_work_total(const std::string& run_dir);

/// Loads the config (defaults when `config_path` is empty), applies the
/// overrides, dispatches and maps exceptions to exit codes. Diagnostics go to
/// `err`.
int run_command(const std::string& subcommand, const std::string& config_path,
                const std::optional<std::string>& out_dir, const std::optional<std::string>& mode,
                std::ostream& log, std::ostream& err);

}  // namespace goalrom
