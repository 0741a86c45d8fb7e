// Command-line front end: pfnl <subcommand> --config <file> [options]

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pfnl/app.hpp"
#include "pfnl/error.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Nonlocal and local hyperbolic phase-field solver"};
  cli.set_version_flag("--version", pfnl::version());
  cli.require_subcommand(1);

  std::string config_path;
  std::optional<double> eps;
  bool local = false;
  std::string run_dir;

  auto* simulate = cli.add_subcommand("simulate", "Solve one trajectory and write energy records and snapshots");
  simulate->add_option("--config", config_path, "Configuration file")->required();
  auto* eps_opt = simulate->add_option("--eps", eps, "Kernel scale (overrides model.eps)");
  simulate->add_flag("--local", local, "Solve the local problem instead")->excludes(eps_opt);

  auto* converge = cli.add_subcommand("converge", "Nonlocal-to-local convergence sweep");
  converge->add_option("--config", config_path, "Configuration file")->required();

  auto* verify_kernel = cli.add_subcommand("verify-kernel", "Kernel constants and moment residual");
  verify_kernel->add_option("--config", config_path, "Configuration file")->required();

  auto* verify_lemmas = cli.add_subcommand("verify-lemmas", "Gamma, operator, Frechet and BBM suites");
  verify_lemmas->add_option("--config", config_path, "Configuration file")->required();

  auto* energy_report = cli.add_subcommand("energy-report", "Summarize the energy records of a simulate run");
  energy_report->add_option("--config", config_path, "Configuration file")->required();
  energy_report->add_option("--run", run_dir, "Output directory of a simulate run")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return 2;
  }

  pfnl::Command command = pfnl::Command::Simulate;
  if (converge->parsed()) command = pfnl::Command::Converge;
  if (verify_kernel->parsed()) command = pfnl::Command::VerifyKernel;
  if (verify_lemmas->parsed()) command = pfnl::Command::VerifyLemmas;
  if (energy_report->parsed()) command = pfnl::Command::EnergyReport;

  pfnl::RunConfig cfg;
  try {
    cfg = pfnl::parse_config(config_path);
  } catch (const pfnl::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  pfnl::CommandOptions options;
  options.eps = eps;
  options.local = local;
  options.run_dir = run_dir;
  return pfnl::run(command, cfg, options, std::cerr);
}
