#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfnl/integrator.hpp"
#include "pfnl/kernels.hpp"
#include "pfnl/physics.hpp"

namespace pfnl {

/// Smooth closed-form field with its gradient, used as a probe.
struct TestField {
  using Point = std::array<double, 2>;
  std::string name;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;

  Field sample(const Grid& grid) const { return Field::sample(grid, value); }
};

/// Five smooth fields per dimension. Chosen so that pairings with the default
/// solution (odd about x_1 = 1/2) do not vanish identically.
std::vector<TestField> default_test_fields(int dimension);
/// Fixed partner w used for the (B_eps v, w) pairing checks.
TestField pairing_partner(int dimension);
TestField constant_field(double c);

/// E(v) = 1/2 int |grad v|^2 on the box of `grid` by Gauss-Legendre quadrature.
double continuum_energy(const TestField& v, const Grid& grid);
/// <Bv, w> = int grad v . grad w.
double continuum_pairing(const TestField& v, const TestField& w, const Grid& grid);

/// Grid for a given eps: n = round(L * cells_per_eps / eps) per axis, capped at max_n.
struct GridRule {
  int dimension = 1;
  double length = 1.0;
  double cells_per_eps = 8.0;
  int max_n = 4096;

  Grid grid_for(double eps) const;
};

/// Strictly decreasing positive eps values.
void validate_eps_list(const std::vector<double>& eps_list);

struct SuiteOutcome {
  bool passed = true;
  std::vector<std::string> failures;
  std::vector<std::string> notices;
  void fail(std::string message) {
    passed = false;
    failures.push_back(std::move(message));
  }
};

struct GammaRow {
  std::string field;
  double eps = 0.0;
  int n = 0;
  double energy_eps = 0.0;
  double energy = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;  ///< NaN when E(v) = 0
};

struct GammaTable {
  std::vector<GammaRow> rows;
  SuiteOutcome outcome;
};

/// Compares E_eps of sampled fields against E. Asserts strictly decreasing
/// error along eps and final relative error <= max_final_rel.
GammaTable gamma_convergence_suite(const KernelFamily& family, const std::vector<TestField>& fields,
                                   const std::vector<double>& eps_list, const GridRule& rule,
                                   double max_final_rel = 0.05);

struct OperatorRow {
  std::string field;
  double eps = 0.0;
  int n = 0;
  double dual_error = 0.0;       ///< ||B_eps v - B v||_{V*}
  double pairing_eps = 0.0;      ///< (B_eps v, w)_H
  double pairing_limit = 0.0;    ///< <B v, w>
  double pairing_error = 0.0;
  double self_pairing_eps = 0.0;    ///< (B_eps v, v)_H
  double self_pairing_limit = 0.0;  ///< int |grad v|^2
  double bbm_ratio = 0.0;           ///< NaN for constant v
};

struct OperatorTable {
  std::vector<OperatorRow> rows;
  SuiteOutcome outcome;
};

/// Asserts ||B_eps v - B v||_{V*} decreasing and the BBM ratio within a factor
/// `bbm_spread` across the sweep, per field.
OperatorTable operator_convergence_suite(const KernelFamily& family, const std::vector<TestField>& fields,
                                         const std::vector<double>& eps_list, const GridRule& rule,
                                         double bbm_spread = 2.0);

enum class ReferenceKind { LocalSolve, FinestEps };
ReferenceKind parse_reference_kind(const std::string& name);

struct SweepConfig {
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  GridRule grid_rule;
  ReferenceKind reference = ReferenceKind::LocalSolve;
  int reference_refine = 2;  ///< reference grid = finest eps grid refined by this factor
  SchemeConfig scheme;
  unsigned threads = 0;  ///< 0: hardware concurrency, capped by PFNL_THREADS
  bool strict = true;    ///< fail on non-monotone errors (otherwise only flag)
};

struct ConvergenceRow {
  double eps = 0.0;
  int n = 0;
  double err_theta_C0H = 0.0;
  double err_phi_C0H = 0.0;
  double err_v_C0Vstar = 0.0;
  double err_Beps_Vstar = 0.0;
  double err_beta_pairing = 0.0;
  double err_B_pairing = 0.0;
  double rate_phi = 0.0;  ///< NaN for the first row
};

/// Per eps and test field: max over snapshots of the pairing errors.
struct PairingRow {
  double eps = 0.0;
  std::string field;
  double B_pairing_error = 0.0;
  double beta_pairing_error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<PairingRow> pairings;
  std::vector<EstimateRecord> estimates;  ///< one per row
  Grid comparison_grid = Grid::line(4);
  Grid reference_grid = Grid::line(4);
  std::vector<Trajectory> trajectories;  ///< one per eps in eps_list
  Trajectory reference;
  SuiteOutcome outcome;
};

/// Solves the local reference and (P)_eps for each eps (concurrently), compares
/// on the coarsest grid and checks monotone convergence.
ConvergenceReport nonlocal_to_local_study(const KernelFamily& family, const SweepConfig& sweep,
                                          const ProblemData& data, const PotentialSpec& spec);

/// Monotonicity checks on a report (strictly decreasing columns and
/// finest/coarsest <= 0.5 for theta and phi).
SuiteOutcome check_report(const ConvergenceReport& report, bool strict);

struct CauchyRow {
  double t = 0.0;
  double h_diff_sq = 0.0;       ///< ||phi_1 - phi_2||_H^2
  double energy_sum = 0.0;      ///< E_eps1(phi_1) + E_eps2(phi_2)
  double dual_diff_sq = 0.0;    ///< ||phi_1 - phi_2||_{V*}^2
};

struct CauchyTable {
  std::vector<CauchyRow> rows;
  double max_h_diff = 0.0;
};

/// Both trajectories must share snapshot times and box; fields are restricted
/// to `comparison`.
CauchyTable cauchy_in_H_diagnostic(const Trajectory& a, const Trajectory& b, const Grid& comparison);

enum class EstimateLemma { UniformEnergy, ThetaRegularity, BetaAndDual };

/// Named time-maxima / time-integrals from a trajectory recorded with monitors.
std::vector<std::pair<std::string, double>> estimate_monitor(const Trajectory& traj, EstimateLemma which);
/// All monitored quantities in a fixed order.
std::vector<std::pair<std::string, double>> estimate_columns(const EstimateRecord& e);

/// Max/min ratio of every monitored quantity across records <= max_ratio.
SuiteOutcome check_uniform_estimates(const std::vector<EstimateRecord>& records, double max_ratio = 2.0);

/// E(phi(t)) <= (1 + slack) min_eps E_eps(phi_eps(t)) at every snapshot.
SuiteOutcome liminf_check(const ConvergenceReport& report, double slack = 0.10);

/// Time-step dominance: |err(dt) - err(dt/2)| <= fraction * err(dt) for the
/// theta and phi columns, per eps.
SuiteOutcome time_step_dominance(const ConvergenceReport& coarse_dt, const ConvergenceReport& fine_dt,
                                 double fraction = 0.1);

/// Thread count for sweeps: hardware concurrency capped by PFNL_THREADS and jobs.
unsigned sweep_threads(unsigned requested, std::size_t jobs);

/// Runs jobs[i]() for every i on up to `threads` workers. Exceptions are
/// collected and the first (by index) is rethrown.
void run_parallel(const std::vector<std::function<void()>>& jobs, unsigned threads);

}  // namespace pfnl
