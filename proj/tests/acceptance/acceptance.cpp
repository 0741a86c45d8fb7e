// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 if any fails.
// Tolerances and runtime budgets are fixed here; nothing is read from the
// environment except PFNL_THREADS (sweep worker count).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pfnl/analysis.hpp"
#include "pfnl/app.hpp"
#include "pfnl/operators.hpp"

using namespace pfnl;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<void(Verdict&)> body;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

Field random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field u(g);
  for (auto& x : u.data()) x = U(rng);
  return u;
}

KernelFamily bump(int d, double alpha = 0.0) { return build_kernel_family(MollifierProfile::compact_bump(), d, alpha); }

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

const std::vector<double> kEpsSweep{0.2, 0.1, 0.05, 0.025};

// 1. kernel constants ------------------------------------------------------

void kernel_correctness(Verdict& v) {
  const double exact[3] = {1.0, 2.0 / pi, 1.5 / pi};
  double worst_cd = 0.0;
  for (int d = 1; d <= 3; ++d) worst_cd = std::max(worst_cd, std::abs(sphere_constant(d) - exact[d - 1]));
  double worst_moment = 0.0;
  for (auto [d, alpha] : {std::pair{1, 0.0}, {2, 0.0}, {2, 1.0}}) worst_moment = std::max(worst_moment, moment_check(bump(d, alpha)));
  v.detail << "max |c_d - exact| = " << sci(worst_cd) << ", max moment residual = " << sci(worst_moment);
  v.require(worst_cd <= 1e-10, "c_d");
  v.require(worst_moment <= 1e-10, "moment");
}

// 2. Frechet identity ------------------------------------------------------

void frechet(Verdict& v) {
  std::mt19937_64 rng(2024);
  double worst_sum = 0.0, worst_fd = 0.0;
  for (int d : {1, 2}) {
    const Grid g = d == 1 ? Grid::line(32) : Grid::square(16);
    const double eps = std::max(0.1, kMinCellsPerEps * g.max_spacing());
    const NonlocalOperator B(bump(d), eps, g);
    for (int k = 0; k < 50; ++k) {
      const auto r = frechet_identity_residual(B, random_field(g, rng), random_field(g, rng));
      worst_sum = std::max(worst_sum, r.double_sum_residual);
      worst_fd = std::max(worst_fd, r.finite_difference_residual / std::abs(r.pairing));
    }
  }
  v.detail << "max |pairing - double sum| = " << sci(worst_sum) << ", max FD relative = " << sci(worst_fd);
  v.require(worst_sum <= 1e-12, "double sum");
  v.require(worst_fd <= 1e-6, "finite difference");
}

// 3. operator algebra ------------------------------------------------------

void operator_algebra(Verdict& v) {
  std::mt19937_64 rng(7);
  double sym = 0, psd = 0, cst = 0, mass = 0, energy = 0;
  for (int d : {1, 2}) {
    const Grid g = d == 1 ? Grid::line(64) : Grid::square(20);
    const double eps = d == 1 ? 0.1 : 0.25;
    const NonlocalOperator B(bump(d), eps, g);
    const oracle::BumpKernel J(d, 0.0, eps);
    for (int k = 0; k < 10; ++k) {
      const Field u = random_field(g, rng), w = random_field(g, rng);
      const Field Bu = B.apply(u), Bw = B.apply(w);
      const double scale = norm_H(Bu) * norm_H(w) + norm_H(u) * norm_H(Bw);
      sym = std::max(sym, std::abs(inner_product(Space::H, Bu, w) - inner_product(Space::H, u, Bw)) / scale);
      psd = std::max(psd, std::max(0.0, -inner_product(Space::H, Bu, u)) / (norm_H(Bu) * norm_H(u)));
      mass = std::max(mass, std::abs(integral(Bu)) / (norm_H(Bu) * std::sqrt(g.domain_volume())));
      const double ds = oracle::double_sum_energy(J, u);
      energy = std::max(energy, std::abs(0.5 * inner_product(Space::H, Bu, u) - ds) / ds);
    }
    const Field Bc = B.apply(Field(g, 1.0));
    double amax = 0.0, bmax = 0.0;
    for (double a : B.a_eps().data()) amax = std::max(amax, a);
    for (double b : Bc.data()) bmax = std::max(bmax, std::abs(b));
    cst = std::max(cst, bmax / amax);
  }
  v.detail << "symmetry " << sci(sym) << ", psd " << sci(psd) << ", constants " << sci(cst) << ", mass " << sci(mass)
           << ", energy vs double sum " << sci(energy);
  for (auto [x, name] : {std::pair{sym, "symmetry"}, {psd, "psd"}, {cst, "constants"}, {mass, "mass"}, {energy, "energy"}})
    v.require(x <= 1e-12, name);
}

// 4. Gamma-convergence -----------------------------------------------------

void gamma_convergence(Verdict& v) {
  for (int d : {1, 2}) {
    TestField f = d == 1
        ? TestField{"cos(pi x)", [](const TestField::Point& p) { return std::cos(pi * p[0]); },
                    [](const TestField::Point& p) { return TestField::Point{-pi * std::sin(pi * p[0]), 0.0}; }}
        : TestField{"cos(pi x)cos(pi y)", [](const TestField::Point& p) { return std::cos(pi * p[0]) * std::cos(pi * p[1]); },
                    [](const TestField::Point& p) {
                      return TestField::Point{-pi * std::sin(pi * p[0]) * std::cos(pi * p[1]),
                                              -pi * std::cos(pi * p[0]) * std::sin(pi * p[1])};
                    }};
    GridRule rule;
    rule.dimension = d;
    const auto table = gamma_convergence_suite(bump(d), {f}, kEpsSweep, rule, 0.05);
    const double E = pi * pi / 4;
    std::vector<double> err;
    for (const auto& r : table.rows) err.push_back(std::abs(r.energy_eps - E) / E);
    v.detail << (d == 1 ? "" : "; ") << "d=" << d << " rel errors";
    for (double e : err) v.detail << " " << sci(e);
    v.require(strictly_decreasing(err), "monotone d=" + std::to_string(d));
    v.require(err.back() <= 0.05, "final d=" + std::to_string(d));
    v.require(table.outcome.passed, "suite d=" + std::to_string(d));
  }
}

// 5. operator convergence and BBM ratio ------------------------------------

void operator_convergence(Verdict& v) {
  for (int d : {1, 2}) {
    GridRule rule;
    rule.dimension = d;
    const auto fields = default_test_fields(d);
    const auto table = operator_convergence_suite(bump(d), fields, kEpsSweep, rule, 2.0);
    double worst_spread = 0.0;
    for (const auto& f : fields) {
      std::vector<double> dual, ratio;
      for (const auto& r : table.rows)
        if (r.field == f.name) {
          dual.push_back(r.dual_error);
          ratio.push_back(r.bbm_ratio);
        }
      v.require(dual.size() == kEpsSweep.size(), "rows for " + f.name);
      v.require(strictly_decreasing(dual), "dual error " + f.name);
      const double spread = *std::max_element(ratio.begin(), ratio.end()) / *std::min_element(ratio.begin(), ratio.end());
      v.require(spread <= 2.0, "bbm spread " + f.name);
      worst_spread = std::max(worst_spread, spread);
    }
    v.require(table.outcome.passed, "suite d=" + std::to_string(d));
    v.detail << (d == 1 ? "" : "; ") << "d=" << d << ": " << fields.size() << " fields, worst BBM spread "
             << sci(worst_spread);
  }
}

// 6. manufactured solution for the local solver ----------------------------

double manufactured_error(int n, double dt, double T) {
  const Grid g = Grid::line(n);
  auto p = [](const Grid& grid, double t) {
    return Field::sample(grid, [t](const Field::Point& x) { return std::exp(-t) * std::cos(pi * x[0]); });
  };
  ProblemData data;
  data.initial = [p](const Grid& grid, std::optional<double>) {
    const Field c = p(grid, 0.0);
    return InitialData{c, c, -1.0 * c};
  };
  data.source = [p](const Grid& grid, double t) { return (pi * pi - 2.0) * p(grid, t); };
  data.phase_source = [p](const Grid& grid, double t) {
    Field q = p(grid, t);
    for (auto& x : q.data()) x = pi * pi * x + x * x * x - 2.0 * x;
    return q;
  };
  SchemeConfig cfg;
  cfg.dt = dt;
  cfg.T = T;
  cfg.snapshots = cfg.step_count();
  const auto traj = solve_trajectory(PhaseOperator::local(g), data, make_double_well(), cfg);
  double err = 0.0;
  for (const State& s : traj.snapshots) {
    const Field exact = p(g, s.t);
    err = std::max({err, norm_H(s.theta - exact), norm_H(s.phi - exact)});
  }
  return err;
}

void manufactured(Verdict& v) {
  const std::vector<double> dts{0.04, 0.02, 0.01, 0.005};
  std::vector<double> e_dt;
  for (double dt : dts) e_dt.push_back(manufactured_error(512, dt, 1.0));
  const double dt_order = oracle::loglog_slope(dts, e_dt);

  const std::vector<int> ns{8, 16, 32, 64};
  std::vector<double> hs, e_h;
  for (int n : ns) {
    hs.push_back(1.0 / n);
    e_h.push_back(manufactured_error(n, 1e-6, 0.01));
  }
  const double h_order = oracle::loglog_slope(hs, e_h);
  v.detail << "dt-order " << sci(dt_order) << ", h-order " << sci(h_order);
  v.require(std::abs(dt_order - 1.0) <= 0.2, "dt order");
  v.require(std::abs(h_order - 2.0) <= 0.3, "h order");
}

// 7. ODE reduction ---------------------------------------------------------

void ode_reduction(Verdict& v) {
  const std::array<double, 3> y0{1.0, 0.5, -0.3};
  const auto ref = oracle::rk4_constant_system(y0, 1.0, 20000);
  ProblemData data;
  data.initial = constant_initial(y0[0], y0[1], y0[2]);
  SchemeConfig cfg;
  cfg.dt = 1e-4;
  cfg.T = 1.0;
  cfg.snapshots = 0;
  const GridRule rule;
  std::vector<PhaseOperator> ops{PhaseOperator::local(rule.grid_for(kEpsSweep.back()))};
  for (double eps : kEpsSweep)
    ops.push_back(PhaseOperator::nonlocal(std::make_shared<const NonlocalOperator>(bump(1), eps, rule.grid_for(eps))));
  double worst = 0.0;
  for (const auto& op : ops) {
    const auto traj = solve_trajectory(op, data, make_zero_potential(), cfg);
    const State& s = traj.snapshots.back();
    for (std::size_t i = 0; i < s.phi.size(); ++i)
      worst = std::max({worst, std::abs(s.theta[i] - ref[0]), std::abs(s.phi[i] - ref[1]), std::abs(s.v[i] - ref[2])});
  }
  v.detail << "local + " << kEpsSweep.size() << " eps, max deviation from RK4 " << sci(worst);
  v.require(worst <= 1e-3, "max norm");
}

// 8. discrete energy balance -----------------------------------------------

void energy_balance(Verdict& v) {
  const RunConfig cfg = parse_config_text("");
  const auto op = PhaseOperator::nonlocal(std::make_shared<const NonlocalOperator>(make_kernel_family(cfg), cfg.eps,
                                                                                   make_grid(cfg)));
  ProblemData data;
  data.initial = make_initial_rule(cfg);
  data.source = make_source(cfg);
  const std::vector<double> dts{4e-3, 2e-3, 1e-3, 5e-4};
  std::vector<double> worst;
  for (double dt : dts) {
    SchemeConfig s = make_scheme(cfg);
    s.dt = dt;
    const auto traj = solve_trajectory(op, data, make_potential(cfg), s);
    double m = 0.0;
    for (const auto& r : traj.energy) m = std::max(m, r.step_residual);
    worst.push_back(m);
  }
  const double slope = oracle::loglog_slope(dts, worst);
  v.detail << "max per-step residual";
  for (double w : worst) v.detail << " " << sci(w);
  v.detail << ", slope " << sci(slope);
  v.require(std::abs(slope - 2.0) <= 0.3, "slope");
}

// 9-11. sweeps ---------------------------------------------------------------

ConvergenceReport study(const RunConfig& cfg) {
  const KernelFamily family = make_kernel_family(cfg);
  const PotentialSpec spec = make_potential(cfg);
  const SweepConfig sweep = make_sweep(cfg);
  std::vector<std::pair<double, Grid>> grids;
  for (double e : sweep.eps_list) grids.emplace_back(e, sweep.grid_rule.grid_for(e));
  ProblemData data = build_initial_data(parse_initial_kind(cfg.initial_kind), make_initial_rule(cfg), family, spec,
                                        grids, cfg.a5_c1);
  data.source = make_source(cfg);
  return nonlocal_to_local_study(family, sweep, data, spec);
}

void uniform_estimates(Verdict& v) {
  const ConvergenceReport report = study(parse_config_text(""));
  v.require(report.estimates.size() == kEpsSweep.size(), "one record per eps");
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t k = 0; k < estimate_columns(report.estimates.front()).size(); ++k) {
    double lo = INFINITY, hi = 0.0;
    std::string name;
    for (const auto& e : report.estimates) {
      const auto [n, x] = estimate_columns(e)[k];
      name = n;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    const double ratio = lo > 0 ? hi / lo : (hi > 0 ? INFINITY : 1.0);
    if (ratio > worst) {
      worst = ratio;
      worst_name = name;
    }
  }
  v.detail << "worst max/min ratio " << sci(worst) << " (" << worst_name << ")";
  v.require(worst <= 2.0, "ratio");
  v.require(check_uniform_estimates(report.estimates, 2.0).passed, "library check");
}

void nonlocal_to_local(Verdict& v) {
  const ConvergenceReport report = study(parse_config_text("time.T = 0.5\n"));
  std::vector<double> th, ph, vv, bp, betap;
  for (const auto& r : report.rows) {
    th.push_back(r.err_theta_C0H);
    ph.push_back(r.err_phi_C0H);
    vv.push_back(r.err_v_C0Vstar);
  }
  v.require(strictly_decreasing(th), "err_theta_C0H");
  v.require(strictly_decreasing(ph), "err_phi_C0H");
  v.require(strictly_decreasing(vv), "err_v_C0Vstar");
  v.require(th.back() / th.front() <= 0.5, "theta ratio");
  v.require(ph.back() / ph.front() <= 0.5, "phi ratio");
  int fields = 0;
  for (const auto& f : default_test_fields(1)) {
    std::vector<double> b, be;
    for (const auto& p : report.pairings)
      if (p.field == f.name) {
        b.push_back(p.B_pairing_error);
        be.push_back(p.beta_pairing_error);
      }
    v.require(b.size() == kEpsSweep.size(), "pairing rows " + f.name);
    v.require(strictly_decreasing(b), "B pairing " + f.name);
    v.require(strictly_decreasing(be), "beta pairing " + f.name);
    ++fields;
  }
  v.detail << "err_phi " << sci(ph.front()) << " -> " << sci(ph.back()) << ", err_theta " << sci(th.front()) << " -> "
           << sci(th.back()) << ", " << fields << " pairing fields";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void determinism(Verdict& v) {
  const fs::path root = fs::temp_directory_path() / "pfnl_acceptance_determinism";
  fs::remove_all(root);
  std::string reports[2];
  for (int k = 0; k < 2; ++k) {
    RunConfig cfg = parse_config_text("time.T = 0.5\n");
    cfg.output_dir = (root / ("run" + std::to_string(k))).string();
    std::ostringstream log;
    const int status = run(Command::Converge, cfg, CommandOptions{}, log);
    v.require(status == 0, "converge exit status " + std::to_string(status));
    reports[k] = slurp(fs::path(cfg.output_dir) / "report.csv");
  }
  v.require(!reports[0].empty(), "report written");
  v.require(reports[0] == reports[1], "byte-identical");
  v.detail << "report.csv " << reports[0].size() << " bytes, identical: " << (reports[0] == reports[1] ? "yes" : "no");
  fs::remove_all(root);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "kernel correctness", 1.0, kernel_correctness},
      {2, "Frechet identity", 30.0, frechet},
      {3, "operator algebra", 10.0, operator_algebra},
      {4, "Gamma-convergence", 60.0, gamma_convergence},
      {5, "operator convergence", 120.0, operator_convergence},
      {6, "local solver order", 300.0, manufactured},
      {7, "ODE reduction", 60.0, ode_reduction},
      {8, "discrete energy balance", 300.0, energy_balance},
      {9, "eps-uniform estimates", 600.0, uniform_estimates},
      {10, "nonlocal-to-local convergence", 900.0, nonlocal_to_local},
      {11, "determinism", 900.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(seconds <= c.budget_seconds, "runtime budget");
    if (!v.pass) ++failed;
    std::printf("%s %2d %-30s %8.2f s (budget %g s)  %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), seconds,
                c.budget_seconds, v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
