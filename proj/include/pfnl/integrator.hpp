#pragma once

#include <optional>
#include <vector>

#include "pfnl/fields.hpp"
#include "pfnl/operators.hpp"
#include "pfnl/physics.hpp"

namespace pfnl {

struct State {
  double t = 0.0;
  Field theta;
  Field phi;
  Field v;  ///< phi_t
};

struct SchemeConfig {
  double dt = 1e-3;
  double T = 1.0;
  double theta_solver_tol = 1e-12;
  double phi_solver_tol = 1e-12;
  int newton_max_iter = 25;
  double newton_tol = 1e-10;
  int snapshots = 20;           ///< interior snapshot count; initial and final are always kept
  bool record_monitors = false;  ///< per-step estimate quantities (costs dual-norm solves)

  void validate() const;
  /// ceil(T / dt), zero when T = 0.
  int step_count() const;
  /// T / step_count(), so the last step lands on T.
  double effective_dt() const;
};

/// Per-step Newton diagnostics.
struct StepStats {
  int newton_iterations = 0;
  double newton_residual = 0.0;
};

/// One step of the semi-implicit scheme for the operator `op` (local or
/// nonlocal). `f_next` and `g_next` are the forcing at t + dt; null means zero.
State step(const State& s, const PhaseOperator& op, const PotentialSpec& spec, const Field* f_next,
           const SchemeConfig& cfg, const Field* g_next = nullptr, StepStats* stats = nullptr);

State step_nonlocal(const State& s, const NonlocalOperator& op, const PotentialSpec& spec, const Field& f_next,
                    const SchemeConfig& cfg);
State step_local(const State& s, const PotentialSpec& spec, const Field& f_next, const SchemeConfig& cfg);

/// Total energy 1/2 ||theta||^2 + 1/2 ||phi||^2 + 1/2 ||v||^2 + E(phi) + int beta_hat(phi).
double total_energy(const State& s, const PhaseOperator& op, const PotentialSpec& spec);
/// Same without the 1/2 ||phi||^2 term. Non-increasing when beta = pi = 0
/// and there is no forcing.
double physical_energy(const State& s, const PhaseOperator& op, const PotentialSpec& spec);

/// |Delta total + dt (||grad theta'||^2 + ||v'||^2) - dt [(f', theta') + (phi - pi(phi), v') + (g', v')]|
/// over one step (primes denote the new state).
double energy_balance_residual(const State& prev, const State& next, const PhaseOperator& op,
                               const PotentialSpec& spec, const Field* f_next, double dt,
                               const Field* g_next = nullptr);

struct EnergyRecord {
  double t = 0.0;
  double norm_theta_H = 0.0;
  double norm_grad_theta_H = 0.0;
  double norm_phi_H = 0.0;
  double norm_v_H = 0.0;
  double energy_phi = 0.0;
  double int_beta_hat = 0.0;
  double total_energy = 0.0;
  double dissipation_accum = 0.0;  ///< int_0^t ||grad theta||^2 + ||v||^2
  double work_accum = 0.0;         ///< int_0^t (f, theta) + (phi - pi(phi), v) + (g, v)
  double step_residual = 0.0;      ///< residual of the last step
  double residual = 0.0;           ///< accumulated |step residuals| up to t
};

/// Running maxima and time integrals of the quantities bounded uniformly in eps.
struct EstimateRecord {
  // L^inf in time
  double theta_H = 0.0;
  double phi_H = 0.0;
  double v_H = 0.0;
  double energy = 0.0;
  double beta_hat_L1 = 0.0;
  double theta_V = 0.0;
  double beta_Lq = 0.0;
  double phi_tt_Vstar = 0.0;
  double B_phi_Vstar = 0.0;
  // L^2 in time (squared integrals)
  double grad_theta_L2H_sq = 0.0;
  double theta_t_L2H_sq = 0.0;
  double lap_theta_L2H = 0.0;  ///< ||Delta theta||_{L^2(0,T;H)}, not squared
};

struct Trajectory {
  std::optional<double> eps;
  double dt = 0.0;
  int steps = 0;
  std::vector<int> snapshot_steps;
  std::vector<State> snapshots;
  std::vector<double> snapshot_energy;  ///< E(phi) at each snapshot
  std::vector<EnergyRecord> energy;     ///< one record per step, plus t = 0
  std::optional<EstimateRecord> estimates;
  int max_newton_iterations = 0;
  double max_abs_phi = 0.0;
  bool lattice_exceeded = false;  ///< |phi| left the potential-check lattice
};

std::vector<int> snapshot_schedule(int steps, int snapshots);

/// Runs the scheme from data.initial(op.grid(), op.eps()). Step failures are
/// rethrown with the failing step index.
Trajectory solve_trajectory(const PhaseOperator& op, const ProblemData& data, const PotentialSpec& spec,
                            const SchemeConfig& cfg);

}  // namespace pfnl
