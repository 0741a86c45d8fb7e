#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pfnl {

/// Fully validated run configuration. Every field carries its documented
/// default; `entries` lists all resolved key/value pairs in key order.
struct RunConfig {
  // grid
  int d = 1;
  int n = 256;
  double length = 1.0;
  // kernel
  std::string kernel_profile = "compact-bump";
  double kernel_support_radius = 1.0;
  double kernel_alpha = 0.0;
  std::string kernel_integrability = "report";
  // model
  double eps = 0.1;
  // potential
  std::string potential_kind = "double-well";
  std::optional<double> potential_q;
  std::optional<double> potential_c_beta;
  std::vector<double> potential_beta_coeffs{0.0, 0.0, 0.0, 1.0};
  double potential_pi_slope = -1.0;
  // initial data
  std::string initial_kind = "smooth-default";
  std::string initial_file;
  std::array<double, 3> initial_constant{0.0, 0.0, 0.0};
  double a5_c1 = 10.0;
  // source
  std::string source_kind = "zero";
  double source_amplitude = 1.0;
  // time
  double T = 1.0;
  double dt = 1e-3;
  int snapshots = 20;
  // solver
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  double cg_tol = 1e-12;
  // sweep
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  int max_n = 4096;
  double cells_per_eps = 8.0;
  std::string reference = "local-solve";
  int reference_refine = 2;
  int threads = 0;
  bool sweep_assert = true;
  // output
  std::string output_dir = "out";
  std::string output_format = "csv";
  std::uint64_t seed = 0;
  bool monitor_estimates = false;

  std::vector<std::pair<std::string, std::string>> entries;
  /// Directory of the config file, used to resolve relative paths.
  std::filesystem::path base_dir;

  /// FNV-1a hash of the canonical "key=value" listing.
  std::uint64_t hash() const;
};

/// Parses flat "key = value" text with optional "[section]" prefixes and '#'
/// comments. All problems are collected and reported together in one
/// ConfigError, one per line, each citing its line number.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<inline>");
RunConfig parse_config(const std::filesystem::path& path);

}  // namespace pfnl
