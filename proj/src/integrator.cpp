#include "pfnl/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfnl/error.hpp"
#include "pfnl/linear_solvers.hpp"

namespace pfnl {

void SchemeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("integrator: dt must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ValidationError("integrator: T must be nonnegative");
  if (T > 0.0 && dt > T) throw ValidationError("integrator: dt must not exceed T");
  for (double tol : {theta_solver_tol, phi_solver_tol, newton_tol}) {
    if (!(tol > 0.0) || tol > 1e-6) throw ValidationError("integrator: solver tolerances must lie in (0, 1e-6]");
  }
  if (newton_max_iter < 1) throw ValidationError("integrator: newton_max_iter must be positive");
  if (snapshots < 0) throw ValidationError("integrator: snapshots must be nonnegative");
}

int SchemeConfig::step_count() const {
  if (T == 0.0) return 0;
  return static_cast<int>(std::ceil(T / dt - 1e-9));
}

double SchemeConfig::effective_dt() const {
  const int n = step_count();
  return n == 0 ? dt : T / n;
}

namespace {

double dot_H(const Field& a, const Field& b) { return inner_product(Space::H, a, b); }

/// Solves (c + beta'(phi)) x + B x = rhs for the Newton correction.
Field solve_jacobian(const PhaseOperator& op, double c, const Field& beta_prime, const Field& rhs, double tol) {
  std::vector<double> shift(beta_prime.data().begin(), beta_prime.data().end());
  for (double& s : shift) s += c;
  if (op.is_local()) return solve_shifted_neumann(shift, rhs, tol);

  const NonlocalOperator& B = *op.nonlocal_operator();
  const Grid& g = rhs.grid();
  std::vector<double> inv_diag = B.diagonal();
  for (std::size_t i = 0; i < inv_diag.size(); ++i) inv_diag[i] = 1.0 / (inv_diag[i] + shift[i]);
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    const Field xf(g, std::vector<double>(x.begin(), x.end()));
    const Field bx = B.apply(xf);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = shift[i] * x[i] + bx[i];
  };
  Field out(g);
  const int max_it = static_cast<int>(std::max<std::size_t>(500, 4 * g.size()));
  const CgResult res = conjugate_gradient(apply, rhs.data(), out.data(), tol, max_it, inv_diag);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "integrator: CG for the Newton system did not converge (relative residual " << res.relative_residual
        << " after " << res.iterations << " iterations)";
    throw SolverError(msg.str());
  }
  return out;
}

}  // namespace

State step(const State& s, const PhaseOperator& op, const PotentialSpec& spec, const Field* f_next,
           const SchemeConfig& cfg, const Field* g_next, StepStats* stats) {
  const double dt = cfg.dt;
  const double c = 1.0 / (dt * dt) + 1.0 / dt;

  // Everything in the phi equation that does not depend on the unknown.
  Field known = c * s.phi;
  known.axpy(1.0 / dt, s.v);
  known += s.theta;
  known -= apply_map(spec.pi, s.phi);
  if (g_next) known += *g_next;

  Field phi = s.phi;
  phi.axpy(dt, s.v);
  const double scale = dt * (1.0 + norm_H(s.phi));
  int it = 0;
  double residual = 0.0;
  for (;; ++it) {
    Field G = c * phi;
    G += op.apply(phi);
    G += apply_map(spec.beta, phi);
    G -= known;
    residual = dt * dt * norm_H(G);
    if (residual <= cfg.newton_tol * scale) break;
    if (it >= cfg.newton_max_iter) {
      std::ostringstream msg;
      msg << "integrator: Newton did not converge in " << cfg.newton_max_iter << " iterations at t = " << s.t
          << " (scaled residual " << residual << ")";
      throw SolverError(msg.str());
    }
    const Field delta = solve_jacobian(op, c, apply_map(spec.beta_prime, phi), G, cfg.phi_solver_tol);
    phi -= delta;
    if (!phi.all_finite()) throw SolverError("integrator: Newton produced non-finite values");
    // Round-off floor: corrections below machine precision cannot reduce G further.
    if (norm_H(delta) <= 1e-14 * (1.0 + norm_H(phi))) {
      ++it;
      break;
    }
  }
  if (stats) {
    stats->newton_iterations = it;
    stats->newton_residual = residual;
  }

  State next;
  next.t = s.t + dt;
  next.v = (1.0 / dt) * (phi - s.phi);
  next.phi = std::move(phi);

  Field rhs = s.theta;
  rhs.axpy(-dt, next.v);
  if (f_next) rhs.axpy(dt, *f_next);
  // (I - dt Delta_N) theta = rhs, scaled by 1/dt for the shared solver.
  rhs *= 1.0 / dt;
  next.theta = solve_shifted_neumann(1.0 / dt, rhs, cfg.theta_solver_tol);
  return next;
}

State step_nonlocal(const State& s, const NonlocalOperator& op, const PotentialSpec& spec, const Field& f_next,
                    const SchemeConfig& cfg) {
  // Non-owning view: the operator outlives this call.
  const PhaseOperator phase = PhaseOperator::nonlocal(std::shared_ptr<const NonlocalOperator>(&op, [](auto*) {}));
  return step(s, phase, spec, &f_next, cfg);
}

State step_local(const State& s, const PotentialSpec& spec, const Field& f_next, const SchemeConfig& cfg) {
  return step(s, PhaseOperator::local(s.phi.grid()), spec, &f_next, cfg);
}

double total_energy(const State& s, const PhaseOperator& op, const PotentialSpec& spec) {
  return physical_energy(s, op, spec) + 0.5 * dot_H(s.phi, s.phi);
}

double physical_energy(const State& s, const PhaseOperator& op, const PotentialSpec& spec) {
  return 0.5 * dot_H(s.theta, s.theta) + 0.5 * dot_H(s.v, s.v) + op.energy(s.phi) + integral_beta_hat(spec, s.phi);
}

namespace {

struct StepBalance {
  double dissipation = 0.0;
  double work = 0.0;
  double residual = 0.0;
};

StepBalance balance(const State& prev, const State& next, double total_prev, double total_next,
                    const PotentialSpec& spec, const Field* f_next, double dt, const Field* g_next) {
  StepBalance b;
  b.dissipation = dt * (gradient_inner(next.theta, next.theta) + dot_H(next.v, next.v));
  double work = dot_H(prev.phi - apply_map(spec.pi, prev.phi), next.v);
  if (f_next) work += dot_H(*f_next, next.theta);
  if (g_next) work += dot_H(*g_next, next.v);
  b.work = dt * work;
  b.residual = std::abs(total_next - total_prev + b.dissipation - b.work);
  return b;
}

}  // namespace

double energy_balance_residual(const State& prev, const State& next, const PhaseOperator& op,
                               const PotentialSpec& spec, const Field* f_next, double dt, const Field* g_next) {
  return balance(prev, next, total_energy(prev, op, spec), total_energy(next, op, spec), spec, f_next, dt, g_next)
      .residual;
}

std::vector<int> snapshot_schedule(int steps, int snapshots) {
  std::vector<int> out;
  for (int k = 0; k <= snapshots + 1; ++k) {
    const int s = static_cast<int>(std::lround(static_cast<double>(k) * steps / (snapshots + 1)));
    if (out.empty() || out.back() != s) out.push_back(s);
  }
  return out;
}

namespace {

EnergyRecord make_record(const State& s, const PhaseOperator& op, const PotentialSpec& spec) {
  EnergyRecord r;
  r.t = s.t;
  r.norm_theta_H = norm_H(s.theta);
  r.norm_grad_theta_H = gradient_norm(s.theta);
  r.norm_phi_H = norm_H(s.phi);
  r.norm_v_H = norm_H(s.v);
  r.energy_phi = op.energy(s.phi);
  r.int_beta_hat = integral_beta_hat(spec, s.phi);
  r.total_energy = 0.5 * (r.norm_theta_H * r.norm_theta_H + r.norm_phi_H * r.norm_phi_H + r.norm_v_H * r.norm_v_H) +
                   r.energy_phi + r.int_beta_hat;
  return r;
}

void update_estimates(EstimateRecord& e, const EnergyRecord& r, const State& s, const PhaseOperator& op,
                      const PotentialSpec& spec) {
  e.theta_H = std::max(e.theta_H, r.norm_theta_H);
  e.phi_H = std::max(e.phi_H, r.norm_phi_H);
  e.v_H = std::max(e.v_H, r.norm_v_H);
  e.energy = std::max(e.energy, r.energy_phi);
  e.beta_hat_L1 = std::max(e.beta_hat_L1, r.int_beta_hat);
  e.theta_V = std::max(e.theta_V, norm_V(s.theta));
  e.beta_Lq = std::max(e.beta_Lq, beta_lq_norm(spec, s.phi));
  e.B_phi_Vstar = std::max(e.B_phi_Vstar, dual_norm(op.apply(s.phi)));
}

}  // namespace

Trajectory solve_trajectory(const PhaseOperator& op, const ProblemData& data, const PotentialSpec& spec,
                            const SchemeConfig& cfg_in) {
  cfg_in.validate();
  if (!data.initial) throw ValidationError("integrator: problem data has no initial rule");
  SchemeConfig cfg = cfg_in;
  cfg.dt = cfg_in.effective_dt();
  const int steps = cfg_in.step_count();
  const Grid& grid = op.grid();

  Trajectory traj;
  traj.eps = op.eps();
  traj.dt = cfg.dt;
  traj.steps = steps;
  traj.snapshot_steps = snapshot_schedule(steps, cfg.snapshots);

  const InitialData init = data.initial(grid, op.eps());
  State s{0.0, init.theta, init.phi, init.v};
  if (!(s.theta.grid() == grid) || !(s.phi.grid() == grid) || !(s.v.grid() == grid)) {
    throw ValidationError("integrator: initial data are not on the operator's grid");
  }

  auto track_phi = [&](const State& st) {
    for (double x : st.phi.data()) traj.max_abs_phi = std::max(traj.max_abs_phi, std::abs(x));
  };
  std::size_t next_snapshot = 0;
  auto maybe_snapshot = [&](int n, const State& st, double energy) {
    if (next_snapshot < traj.snapshot_steps.size() && traj.snapshot_steps[next_snapshot] == n) {
      traj.snapshots.push_back(st);
      traj.snapshot_energy.push_back(energy);
      ++next_snapshot;
    }
  };

  EnergyRecord rec = make_record(s, op, spec);
  traj.energy.push_back(rec);
  track_phi(s);
  maybe_snapshot(0, s, rec.energy_phi);
  if (cfg.record_monitors) {
    traj.estimates.emplace();
    update_estimates(*traj.estimates, rec, s, op, spec);
  }

  for (int n = 0; n < steps; ++n) {
    const double t_next = (n + 1) * cfg.dt;
    std::optional<Field> f, g;
    if (data.source) f = data.source(grid, t_next);
    if (data.phase_source) g = data.phase_source(grid, t_next);

    State next;
    StepStats stats;
    try {
      next = step(s, op, spec, f ? &*f : nullptr, cfg, g ? &*g : nullptr, &stats);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.what() << " [step " << n + 1 << " of " << steps << "]";
      throw SolverError(msg.str());
    }
    next.t = t_next;
    traj.max_newton_iterations = std::max(traj.max_newton_iterations, stats.newton_iterations);

    EnergyRecord nr = make_record(next, op, spec);
    const StepBalance b =
        balance(s, next, rec.total_energy, nr.total_energy, spec, f ? &*f : nullptr, cfg.dt, g ? &*g : nullptr);
    nr.dissipation_accum = rec.dissipation_accum + b.dissipation;
    nr.work_accum = rec.work_accum + b.work;
    nr.step_residual = b.residual;
    nr.residual = rec.residual + b.residual;

    if (traj.estimates) {
      EstimateRecord& e = *traj.estimates;
      update_estimates(e, nr, next, op, spec);
      e.phi_tt_Vstar = std::max(e.phi_tt_Vstar, dual_norm((1.0 / cfg.dt) * (next.v - s.v)));
      e.grad_theta_L2H_sq += cfg.dt * nr.norm_grad_theta_H * nr.norm_grad_theta_H;
      const Field theta_t = (1.0 / cfg.dt) * (next.theta - s.theta);
      e.theta_t_L2H_sq += cfg.dt * dot_H(theta_t, theta_t);
      const Field lap = neumann_laplacian(next.theta);
      const double lap_sq = std::pow(e.lap_theta_L2H, 2) + cfg.dt * dot_H(lap, lap);
      e.lap_theta_L2H = std::sqrt(lap_sq);
    }

    s = std::move(next);
    rec = nr;
    traj.energy.push_back(rec);
    track_phi(s);
    maybe_snapshot(n + 1, s, rec.energy_phi);
  }
  traj.lattice_exceeded = traj.max_abs_phi > kLatticeBound;
  return traj;
}

}  // namespace pfnl
