#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pfnl/analysis.hpp"
#include "pfnl/config.hpp"
#include "pfnl/field_io.hpp"

namespace pfnl {

enum class Command { Simulate, Converge, VerifyKernel, VerifyLemmas, EnergyReport };

struct CommandOptions {
  std::optional<double> eps;  ///< simulate: overrides model.eps
  bool local = false;         ///< simulate: solve the local problem
  std::filesystem::path run_dir;  ///< energy-report: output directory of a simulate run
};

// Builders from a validated configuration.
Grid make_grid(const RunConfig& cfg);
KernelFamily make_kernel_family(const RunConfig& cfg);
PotentialSpec make_potential(const RunConfig& cfg);  ///< throws ValidationError listing violations
SchemeConfig make_scheme(const RunConfig& cfg);
SweepConfig make_sweep(const RunConfig& cfg);
InitialRule make_initial_rule(const RunConfig& cfg);
SourceTerm make_source(const RunConfig& cfg);

/// energy.csv content for a trajectory.
std::string energy_csv(const Trajectory& traj);
/// report.csv content (byte-stable for identical inputs).
std::string report_csv(const ConvergenceReport& report);
std::string estimates_csv(const ConvergenceReport& report);
std::string pairings_csv(const ConvergenceReport& report);

/// Runs a subcommand and returns the process exit status: 0 success,
/// 1 assertion or solver failure, 2 configuration or validation error.
/// Diagnostics go to `log`.
int run(Command command, const RunConfig& cfg, const CommandOptions& options, std::ostream& log);

/// Version string of the library.
std::string version();

}  // namespace pfnl
