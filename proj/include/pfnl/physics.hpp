#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfnl/fields.hpp"
#include "pfnl/kernels.hpp"

namespace pfnl {

using ScalarMap = std::function<double(double)>;

/// beta monotone part, beta_hat its antiderivative with beta_hat(0) = 0, pi the
/// Lipschitz perturbation. q and c_beta are the growth constants in
/// |beta(r)|^q <= c_beta (1 + beta_hat(r)).
struct PotentialSpec {
  std::string name;
  ScalarMap beta;
  ScalarMap beta_prime;
  ScalarMap beta_hat;
  ScalarMap pi;
  double q = 2.0;
  double c_beta = 1.0;
  double pi_lipschitz = 0.0;
};

/// beta(r) = r^3, beta_hat(r) = r^4 / 4, pi(r) = -r, q = 4/3, c_beta = 4.
PotentialSpec make_double_well();
/// beta = pi = 0.
PotentialSpec make_zero_potential();
/// beta(r) = sum_k coeffs[k] r^k, pi(r) = pi_slope * r.
PotentialSpec make_polynomial_potential(std::vector<double> beta_coeffs, double pi_slope, double q, double c_beta);

struct PotentialViolation {
  std::string kind;  ///< monotonicity, beta_hat_zero, beta_hat_nonnegative, convexity, derivative, growth, exponent, lipschitz
  double r = 0.0;    ///< first witness on the lattice
  std::string detail;
};

inline constexpr double kLatticeBound = 5.0;
inline constexpr int kLatticePoints = 10000;

/// Lattice checks over [-5, 5]. At most one violation is reported per kind.
std::vector<PotentialViolation> validate_potential(const PotentialSpec& spec, int dimension = 1);

/// Pointwise maps applied to a field.
Field apply_map(const ScalarMap& map, const Field& u);
/// int_Omega beta_hat(u)
double integral_beta_hat(const PotentialSpec& spec, const Field& u);
/// ||beta(u)||_{L^q}
double beta_lq_norm(const PotentialSpec& spec, const Field& u);

/// Time-dependent forcing evaluated on a grid. An empty function means zero.
using SourceTerm = std::function<Field(const Grid&, double t)>;

/// f(x, t) = amplitude * cos(pi x_1) e^{-t}.
SourceTerm make_cosine_source(double amplitude);

struct InitialData {
  Field theta;
  Field phi;
  Field v;
};

/// Initial data as a rule on any grid: eps-dependent data may depend on eps,
/// the local problem receives std::nullopt.
using InitialRule = std::function<InitialData(const Grid&, std::optional<double> eps)>;

enum class InitialKind { SmoothDefault, Constant, Custom };
InitialKind parse_initial_kind(const std::string& name);

/// theta0 = cos(pi x_1) / 2, phi0 = cos(pi x_1), v0 = 0.
InitialRule smooth_default_initial();
InitialRule constant_initial(double theta, double phi, double v);
/// Data given on one grid, transferred to any other grid over the same box by
/// cell-average projection.
InitialRule tabulated_initial(InitialData data);

/// Per-eps record of the uniform bound on the initial data:
/// ||theta||_V^2 + ||phi||_H^2 + E_eps(phi) + int beta_hat(phi) + ||v||_H^2.
struct A5Entry {
  double eps = 0.0;
  double value = 0.0;
  double energy = 0.0;
  double theta_gap_H = 0.0;  ///< ||theta_{0,eps} - theta_0||_H
  double phi_gap_H = 0.0;
  double v_gap_Vstar = 0.0;
};

struct A5Report {
  double c1 = 10.0;
  std::vector<A5Entry> entries;
  /// Log-log slope of the monitor against eps (NaN with fewer than two eps).
  double slope = 0.0;
  /// Set when the monitor grows like a negative power of eps (slope < -0.5).
  bool unbounded = false;
};

struct ProblemData {
  InitialKind kind = InitialKind::SmoothDefault;
  InitialRule initial;
  SourceTerm source;        ///< f in the theta equation
  SourceTerm phase_source;  ///< optional extra forcing g in the phi equation
  A5Report a5;
};

/// Evaluates the uniform bound for every (eps, grid) pair and throws a
/// ValidationError when it exceeds c1.
A5Report evaluate_initial_bound(const InitialRule& rule, const KernelFamily& family, const PotentialSpec& spec,
                                const std::vector<std::pair<double, Grid>>& eps_grids, double c1);

ProblemData build_initial_data(InitialKind kind, InitialRule rule, const KernelFamily& family,
                               const PotentialSpec& spec, const std::vector<std::pair<double, Grid>>& eps_grids,
                               double c1 = 10.0);

}  // namespace pfnl
