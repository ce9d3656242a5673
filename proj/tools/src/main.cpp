#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "goalrom/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Goal-oriented adaptive sampling for LSPG reduced-order models of steady 1D Burgers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string mode;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides [output] directory)");
  app.add_option("--mode", mode, "Sampling mode")
      ->check(CLI::IsMember({"rom", "hrom", "hrom-hyperdwr", "greedy"}));

  app.add_subcommand("verify", "Fixed-basis ECSW verification study");
  app.add_subcommand("adapt", "Adaptive sampling run");
  app.add_subcommand("greedy", "Residual-norm greedy baseline at a matched work budget");
  app.add_subcommand("work", "Rebuild the work-unit ledger of a run directory");
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : goalrom::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return goalrom::run_command(command, config_path, out_dir.empty() ? std::nullopt : std::optional(out_dir),
                              mode.empty() ? std::nullopt : std::optional(mode), std::cout, std::cerr);
}
