#include "pfnl/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

#include "pfnl/error.hpp"

namespace pfnl {

namespace {

constexpr double pi = std::numbers::pi;
using Point = TestField::Point;

TestField make_field(std::string name, std::function<double(const Point&)> f, std::function<Point(const Point&)> g) {
  return TestField{std::move(name), std::move(f), std::move(g)};
}

std::string format_double(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

}  // namespace

std::vector<TestField> default_test_fields(int dimension) {
  using std::cos;
  using std::exp;
  using std::sin;
  if (dimension == 1) {
    return {
        make_field("cos(pi x)", [](const Point& x) { return cos(pi * x[0]); },
                   [](const Point& x) { return Point{-pi * sin(pi * x[0]), 0.0}; }),
        make_field("cos(3 pi x)", [](const Point& x) { return cos(3 * pi * x[0]); },
                   [](const Point& x) { return Point{-3 * pi * sin(3 * pi * x[0]), 0.0}; }),
        make_field("x^2", [](const Point& x) { return x[0] * x[0]; },
                   [](const Point& x) { return Point{2 * x[0], 0.0}; }),
        make_field("exp(-x)", [](const Point& x) { return exp(-x[0]); },
                   [](const Point& x) { return Point{-exp(-x[0]), 0.0}; }),
        make_field("cos(pi x) + cos(2 pi x)/2", [](const Point& x) { return cos(pi * x[0]) + 0.5 * cos(2 * pi * x[0]); },
                   [](const Point& x) { return Point{-pi * sin(pi * x[0]) - pi * sin(2 * pi * x[0]), 0.0}; }),
    };
  }
  if (dimension == 2) {
    return {
        make_field("cos(pi x)cos(pi y)", [](const Point& x) { return cos(pi * x[0]) * cos(pi * x[1]); },
                   [](const Point& x) {
                     return Point{-pi * sin(pi * x[0]) * cos(pi * x[1]), -pi * cos(pi * x[0]) * sin(pi * x[1])};
                   }),
        make_field("cos(2 pi x) + cos(pi y)", [](const Point& x) { return cos(2 * pi * x[0]) + cos(pi * x[1]); },
                   [](const Point& x) { return Point{-2 * pi * sin(2 * pi * x[0]), -pi * sin(pi * x[1])}; }),
        make_field("x^2 y", [](const Point& x) { return x[0] * x[0] * x[1]; },
                   [](const Point& x) { return Point{2 * x[0] * x[1], x[0] * x[0]}; }),
        make_field("exp(-x-y)", [](const Point& x) { return exp(-x[0] - x[1]); },
                   [](const Point& x) {
                     const double e = exp(-x[0] - x[1]);
                     return Point{-e, -e};
                   }),
        make_field("cos(pi x) + cos(2 pi y)/2", [](const Point& x) { return cos(pi * x[0]) + 0.5 * cos(2 * pi * x[1]); },
                   [](const Point& x) { return Point{-pi * sin(pi * x[0]), -pi * sin(2 * pi * x[1])}; }),
    };
  }
  throw ValidationError("analysis: test fields exist for d = 1, 2 only");
}

TestField pairing_partner(int dimension) {
  if (dimension == 1) {
    return make_field("cos(2 pi x)", [](const Point& x) { return std::cos(2 * pi * x[0]); },
                      [](const Point& x) { return Point{-2 * pi * std::sin(2 * pi * x[0]), 0.0}; });
  }
  return make_field("cos(2 pi x)cos(pi y)", [](const Point& x) { return std::cos(2 * pi * x[0]) * std::cos(pi * x[1]); },
                    [](const Point& x) {
                      return Point{-2 * pi * std::sin(2 * pi * x[0]) * std::cos(pi * x[1]),
                                   -pi * std::cos(2 * pi * x[0]) * std::sin(pi * x[1])};
                    });
}

TestField constant_field(double c) {
  return make_field("constant", [c](const Point&) { return c; }, [](const Point&) { return Point{0.0, 0.0}; });
}

namespace {

/// Integral of f over the box of `grid` with a tensor Gauss-Legendre rule on
/// sub-intervals of width <= 1/8.
double box_integral(const Grid& grid, const std::function<double(const Point&)>& f) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  auto pieces = [](double L) { return std::max(1, static_cast<int>(std::ceil(L * 8.0))); };
  const double L0 = grid.length(0);
  const int m0 = pieces(L0);
  double total = 0.0;
  for (int a = 0; a < m0; ++a) {
    const double lo0 = L0 * a / m0, hi0 = L0 * (a + 1) / m0;
    if (grid.dimension() == 1) {
      total += Rule::integrate([&](double x) { return f(Point{x, 0.0}); }, lo0, hi0);
      continue;
    }
    const double L1 = grid.length(1);
    const int m1 = pieces(L1);
    total += Rule::integrate(
        [&](double x) {
          double inner = 0.0;
          for (int b = 0; b < m1; ++b) {
            inner += Rule::integrate([&](double y) { return f(Point{x, y}); }, L1 * b / m1, L1 * (b + 1) / m1);
          }
          return inner;
        },
        lo0, hi0);
  }
  return total;
}

}  // namespace

double continuum_energy(const TestField& v, const Grid& grid) { return 0.5 * continuum_pairing(v, v, grid); }

double continuum_pairing(const TestField& v, const TestField& w, const Grid& grid) {
  return box_integral(grid, [&](const Point& x) {
    const Point a = v.gradient(x);
    const Point b = w.gradient(x);
    return a[0] * b[0] + (grid.dimension() == 2 ? a[1] * b[1] : 0.0);
  });
}

Grid GridRule::grid_for(double eps) const {
  if (!(eps > 0.0)) throw ValidationError("analysis: eps must be positive");
  const int n = std::max(4, std::min(max_n, static_cast<int>(std::lround(length * cells_per_eps / eps))));
  const Grid g = dimension == 1 ? Grid::line(n, length) : Grid::square(n, length);
  check_resolution(eps, g);
  return g;
}

void validate_eps_list(const std::vector<double>& eps_list) {
  if (eps_list.empty()) throw ValidationError("analysis: eps list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || eps_list[i] > 1.0) throw ValidationError("analysis: eps values must lie in (0, 1]");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw ValidationError("analysis: eps list must be strictly decreasing");
    }
  }
}

namespace {

/// Strictly decreasing check with a failure message per violation.
void require_decreasing(SuiteOutcome& out, const std::vector<double>& eps, const std::vector<double>& values,
                        const std::string& what, bool strict) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] < values[i - 1])) {
      const std::string msg = what + " not decreasing from eps = " + format_double(eps[i - 1]) + " (" +
                              format_double(values[i - 1]) + ") to eps = " + format_double(eps[i]) + " (" +
                              format_double(values[i]) + ")";
      if (strict) {
        out.fail(msg);
      } else {
        out.notices.push_back(msg);
      }
    }
  }
}

}  // namespace

GammaTable gamma_convergence_suite(const KernelFamily& family, const std::vector<TestField>& fields,
                                   const std::vector<double>& eps_list, const GridRule& rule, double max_final_rel) {
  validate_eps_list(eps_list);
  GammaTable table;
  for (const TestField& f : fields) {
    std::vector<double> errors;
    double energy = 0.0;
    for (double eps : eps_list) {
      const Grid g = rule.grid_for(eps);
      const NonlocalOperator op(family, eps, g);
      GammaRow row;
      row.field = f.name;
      row.eps = eps;
      row.n = g.cells(0);
      row.energy_eps = op.energy(f.sample(g));
      row.energy = energy = continuum_energy(f, g);
      row.abs_error = std::abs(row.energy_eps - row.energy);
      row.rel_error = row.energy > 0.0 ? row.abs_error / row.energy : std::nan("");
      errors.push_back(row.abs_error);
      table.rows.push_back(row);
    }
    if (energy > 0.0) {
      if (eps_list.size() > 1) {
        require_decreasing(table.outcome, eps_list, errors, "Gamma error for " + f.name, true);
      } else {
        table.outcome.notices.push_back("single eps: monotonicity not checked");
      }
      const double final_rel = table.rows.back().rel_error;
      if (!(final_rel <= max_final_rel)) {
        table.outcome.fail("relative Gamma error for " + f.name + " is " + format_double(final_rel) + " > " +
                           format_double(max_final_rel));
      }
    } else if (!(table.rows.back().abs_error <= 1e-10)) {
      table.outcome.fail("E_eps of " + f.name + " does not vanish");
    }
  }
  return table;
}

OperatorTable operator_convergence_suite(const KernelFamily& family, const std::vector<TestField>& fields,
                                         const std::vector<double>& eps_list, const GridRule& rule,
                                         double bbm_spread) {
  validate_eps_list(eps_list);
  const TestField partner = pairing_partner(rule.dimension);
  OperatorTable table;
  for (const TestField& f : fields) {
    std::vector<double> errors, ratios;
    bool constant = true;
    for (double eps : eps_list) {
      const Grid g = rule.grid_for(eps);
      const NonlocalOperator op(family, eps, g);
      const Field v = f.sample(g);
      const Field w = partner.sample(g);
      const Field Bv_eps = op.apply(v);
      OperatorRow row;
      row.field = f.name;
      row.eps = eps;
      row.n = g.cells(0);
      row.dual_error = dual_norm(Bv_eps - apply_B_local(v));
      row.pairing_eps = inner_product(Space::H, Bv_eps, w);
      row.pairing_limit = continuum_pairing(f, partner, g);
      row.pairing_error = std::abs(row.pairing_eps - row.pairing_limit);
      row.self_pairing_eps = inner_product(Space::H, Bv_eps, v);
      row.self_pairing_limit = continuum_pairing(f, f, g);
      constant = row.self_pairing_limit == 0.0;
      try {
        row.bbm_ratio = bbm_bound_ratio(op, v);
        ratios.push_back(row.bbm_ratio);
      } catch (const DegenerateError&) {
        row.bbm_ratio = std::nan("");
      }
      errors.push_back(row.dual_error);
      table.rows.push_back(row);
    }
    if (constant) {
      for (double e : errors) {
        if (!(e <= 1e-10)) table.outcome.fail("B_eps does not annihilate " + f.name);
      }
      continue;
    }
    if (eps_list.size() > 1) {
      require_decreasing(table.outcome, eps_list, errors, "||B_eps v - B v||_V* for " + f.name, true);
    } else {
      table.outcome.notices.push_back("single eps: monotonicity not checked");
    }
    if (!ratios.empty()) {
      const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
      if (!(*hi <= bbm_spread * *lo)) {
        table.outcome.fail("BBM ratio for " + f.name + " spreads from " + format_double(*lo) + " to " +
                           format_double(*hi));
      }
    }
  }
  return table;
}

ReferenceKind parse_reference_kind(const std::string& name) {
  if (name == "local-solve") return ReferenceKind::LocalSolve;
  if (name == "finest-eps") return ReferenceKind::FinestEps;
  throw ValidationError("analysis: unknown reference '" + name + "' (expected local-solve or finest-eps)");
}

unsigned sweep_threads(unsigned requested, std::size_t jobs) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PFNL_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

void run_parallel(const std::vector<std::function<void()>>& jobs, unsigned threads) {
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        jobs[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

struct SnapshotView {
  std::vector<Field> theta, phi, v, B_phi;           // restricted to the comparison grid
  std::vector<std::vector<double>> B_pair, beta_pair;  // [snapshot][field]
};

SnapshotView view_of(const Trajectory& traj, const PhaseOperator& op, const PotentialSpec& spec,
                     const Grid& comparison, const std::vector<TestField>& fields) {
  SnapshotView view;
  std::vector<Field> w;
  for (const TestField& f : fields) w.push_back(f.sample(op.grid()));
  for (const State& s : traj.snapshots) {
    const Field B = op.apply(s.phi);
    const Field b = apply_map(spec.beta, s.phi);
    view.theta.push_back(restrict_to(s.theta, comparison));
    view.phi.push_back(restrict_to(s.phi, comparison));
    view.v.push_back(restrict_to(s.v, comparison));
    view.B_phi.push_back(restrict_to(B, comparison));
    std::vector<double> bp, betap;
    for (const Field& wi : w) {
      bp.push_back(inner_product(Space::H, B, wi));
      betap.push_back(inner_product(Space::H, b, wi));
    }
    view.B_pair.push_back(std::move(bp));
    view.beta_pair.push_back(std::move(betap));
  }
  return view;
}

}  // namespace

ConvergenceReport nonlocal_to_local_study(const KernelFamily& family, const SweepConfig& sweep,
                                          const ProblemData& data, const PotentialSpec& spec) {
  validate_eps_list(sweep.eps_list);
  sweep.scheme.validate();
  if (sweep.reference_refine < 1) throw ValidationError("analysis: reference_refine must be at least 1");
  if (sweep.reference == ReferenceKind::FinestEps && sweep.eps_list.size() < 2) {
    throw ValidationError("analysis: finest-eps reference needs at least two eps values");
  }
  const std::size_t m = sweep.eps_list.size();
  std::vector<Grid> grids;
  for (double eps : sweep.eps_list) grids.push_back(sweep.grid_rule.grid_for(eps));

  ConvergenceReport report;
  report.comparison_grid = grids.front();
  SchemeConfig scheme = sweep.scheme;
  scheme.record_monitors = true;

  std::vector<std::optional<PhaseOperator>> ops(m);
  std::vector<Trajectory> trajs(m);
  std::optional<PhaseOperator> ref_op;
  std::vector<std::function<void()>> jobs;
  if (sweep.reference == ReferenceKind::LocalSolve) {
    const Grid& finest = grids.back();
    const int d = finest.dimension();
    report.reference_grid =
        Grid(d, {finest.cells(0) * sweep.reference_refine, d == 2 ? finest.cells(1) * sweep.reference_refine : 1},
             {finest.length(0), finest.length(1)});
    ref_op = PhaseOperator::local(report.reference_grid);
    jobs.push_back([&] { report.reference = solve_trajectory(*ref_op, data, spec, scheme); });
  }
  for (std::size_t i = 0; i < m; ++i) {
    jobs.push_back([&, i] {
      ops[i] = PhaseOperator::nonlocal(std::make_shared<const NonlocalOperator>(family, sweep.eps_list[i], grids[i]));
      trajs[i] = solve_trajectory(*ops[i], data, spec, scheme);
    });
  }
  // Largest problems first keeps the tail short.
  std::reverse(jobs.begin(), jobs.end());
  run_parallel(jobs, sweep_threads(sweep.threads, jobs.size()));

  std::size_t rows = m;
  if (sweep.reference == ReferenceKind::FinestEps) {
    rows = m - 1;
    report.reference = trajs.back();
    report.reference_grid = grids.back();
    ref_op = ops.back();
  }

  const std::vector<TestField> fields = default_test_fields(sweep.grid_rule.dimension);
  const SnapshotView ref = view_of(report.reference, *ref_op, spec, report.comparison_grid, fields);
  for (std::size_t i = 0; i < rows; ++i) {
    const SnapshotView cur = view_of(trajs[i], *ops[i], spec, report.comparison_grid, fields);
    if (cur.phi.size() != ref.phi.size()) throw Error("analysis: snapshot schedules differ");
    ConvergenceRow row;
    row.eps = sweep.eps_list[i];
    row.n = grids[i].cells(0);
    std::vector<PairingRow> pair_rows(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) pair_rows[f] = {row.eps, fields[f].name, 0.0, 0.0};
    for (std::size_t k = 0; k < ref.phi.size(); ++k) {
      row.err_theta_C0H = std::max(row.err_theta_C0H, norm_H(cur.theta[k] - ref.theta[k]));
      row.err_phi_C0H = std::max(row.err_phi_C0H, norm_H(cur.phi[k] - ref.phi[k]));
      row.err_v_C0Vstar = std::max(row.err_v_C0Vstar, dual_norm(cur.v[k] - ref.v[k]));
      row.err_Beps_Vstar = std::max(row.err_Beps_Vstar, dual_norm(cur.B_phi[k] - ref.B_phi[k]));
      for (std::size_t f = 0; f < fields.size(); ++f) {
        const double eb = std::abs(cur.B_pair[k][f] - ref.B_pair[k][f]);
        const double ebeta = std::abs(cur.beta_pair[k][f] - ref.beta_pair[k][f]);
        pair_rows[f].B_pairing_error = std::max(pair_rows[f].B_pairing_error, eb);
        pair_rows[f].beta_pairing_error = std::max(pair_rows[f].beta_pairing_error, ebeta);
        row.err_B_pairing = std::max(row.err_B_pairing, eb);
        row.err_beta_pairing = std::max(row.err_beta_pairing, ebeta);
      }
    }
    row.rate_phi = i == 0 ? std::nan("")
                          : std::log(row.err_phi_C0H / report.rows.back().err_phi_C0H) /
                                std::log(row.eps / report.rows.back().eps);
    report.rows.push_back(row);
    report.pairings.insert(report.pairings.end(), pair_rows.begin(), pair_rows.end());
    report.estimates.push_back(*trajs[i].estimates);
  }
  report.trajectories = std::move(trajs);
  report.outcome = check_report(report, sweep.strict);
  return report;
}

SuiteOutcome check_report(const ConvergenceReport& report, bool strict) {
  SuiteOutcome out;
  const auto& rows = report.rows;
  for (const ConvergenceRow& r : rows) {
    for (double v : {r.err_theta_C0H, r.err_phi_C0H, r.err_v_C0Vstar, r.err_Beps_Vstar, r.err_beta_pairing}) {
      if (!(std::isfinite(v) && v >= 0.0)) out.fail("non-finite or negative error at eps = " + format_double(r.eps));
    }
  }
  if (rows.size() < 2) {
    out.notices.push_back("single eps: monotonicity assertions skipped");
    return out;
  }
  std::vector<double> eps;
  for (const auto& r : rows) eps.push_back(r.eps);
  auto column = [&](double ConvergenceRow::*member) {
    std::vector<double> c;
    for (const auto& r : rows) c.push_back(r.*member);
    return c;
  };
  require_decreasing(out, eps, column(&ConvergenceRow::err_theta_C0H), "err_theta_C0H", strict);
  require_decreasing(out, eps, column(&ConvergenceRow::err_phi_C0H), "err_phi_C0H", strict);
  require_decreasing(out, eps, column(&ConvergenceRow::err_v_C0Vstar), "err_v_C0Vstar", strict);
  require_decreasing(out, eps, column(&ConvergenceRow::err_Beps_Vstar), "err_Beps_Vstar", strict);
  require_decreasing(out, eps, column(&ConvergenceRow::err_beta_pairing), "err_beta_pairing", strict);
  require_decreasing(out, eps, column(&ConvergenceRow::err_B_pairing), "err_B_pairing", strict);
  for (auto member : {&ConvergenceRow::err_theta_C0H, &ConvergenceRow::err_phi_C0H}) {
    const double ratio = rows.back().*member / (rows.front().*member);
    if (!(ratio <= 0.5)) {
      const std::string name = member == &ConvergenceRow::err_theta_C0H ? "err_theta_C0H" : "err_phi_C0H";
      const std::string msg = name + " finest/coarsest ratio " + format_double(ratio) + " > 0.5";
      if (strict) {
        out.fail(msg);
      } else {
        out.notices.push_back(msg);
      }
    }
  }
  return out;
}

CauchyTable cauchy_in_H_diagnostic(const Trajectory& a, const Trajectory& b, const Grid& comparison) {
  if (a.snapshots.size() != b.snapshots.size()) throw ValidationError("analysis: snapshot counts differ");
  CauchyTable table;
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    const State& sa = a.snapshots[k];
    const State& sb = b.snapshots[k];
    if (std::abs(sa.t - sb.t) > 1e-9 * std::max(1.0, std::abs(sa.t))) {
      throw ValidationError("analysis: snapshot times differ");
    }
    for (int axis = 0; axis < comparison.dimension(); ++axis) {
      if (std::abs(sa.phi.grid().length(axis) - comparison.length(axis)) > 1e-12 ||
          std::abs(sb.phi.grid().length(axis) - comparison.length(axis)) > 1e-12 ||
          sa.phi.grid().dimension() != comparison.dimension() || sb.phi.grid().dimension() != comparison.dimension()) {
        throw ValidationError("analysis: grid mismatch in the Cauchy diagnostic");
      }
    }
    const Field diff = restrict_to(sa.phi, comparison) - restrict_to(sb.phi, comparison);
    CauchyRow row;
    row.t = sa.t;
    row.h_diff_sq = inner_product(Space::H, diff, diff);
    row.energy_sum = a.snapshot_energy[k] + b.snapshot_energy[k];
    const double dn = dual_norm(diff);
    row.dual_diff_sq = dn * dn;
    table.max_h_diff = std::max(table.max_h_diff, std::sqrt(row.h_diff_sq));
    table.rows.push_back(row);
  }
  return table;
}

std::vector<std::pair<std::string, double>> estimate_monitor(const Trajectory& traj, EstimateLemma which) {
  if (!traj.estimates) throw ValidationError("analysis: trajectory was recorded without monitors");
  const EstimateRecord& e = *traj.estimates;
  switch (which) {
    case EstimateLemma::UniformEnergy:
      return {{"theta_Linf_H", e.theta_H},        {"grad_theta_L2_H", std::sqrt(e.grad_theta_L2H_sq)},
              {"phi_Linf_H", e.phi_H},            {"v_Linf_H", e.v_H},
              {"energy_Linf", e.energy},          {"beta_hat_Linf_L1", e.beta_hat_L1}};
    case EstimateLemma::ThetaRegularity:
      return {{"theta_t_L2_H", std::sqrt(e.theta_t_L2H_sq)},
              {"theta_Linf_V", e.theta_V},
              {"lap_theta_L2_H", e.lap_theta_L2H}};
    case EstimateLemma::BetaAndDual:
      return {{"beta_Linf_Lq", e.beta_Lq}, {"phi_tt_Linf_Vstar", e.phi_tt_Vstar}, {"B_phi_Linf_Vstar", e.B_phi_Vstar}};
  }
  return {};
}

std::vector<std::pair<std::string, double>> estimate_columns(const EstimateRecord& e) {
  Trajectory t;
  t.estimates = e;
  std::vector<std::pair<std::string, double>> out;
  for (EstimateLemma which : {EstimateLemma::UniformEnergy, EstimateLemma::ThetaRegularity, EstimateLemma::BetaAndDual}) {
    auto part = estimate_monitor(t, which);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

SuiteOutcome check_uniform_estimates(const std::vector<EstimateRecord>& records, double max_ratio) {
  SuiteOutcome out;
  if (records.empty()) return out;
  const std::size_t k = estimate_columns(records.front()).size();
  for (std::size_t j = 0; j < k; ++j) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::string name;
    for (const EstimateRecord& r : records) {
      const auto cols = estimate_columns(r);
      name = cols[j].first;
      lo = std::min(lo, cols[j].second);
      hi = std::max(hi, cols[j].second);
    }
    if (hi == 0.0) continue;  // identically zero across eps
    if (!(hi <= max_ratio * lo)) {
      out.fail(name + " varies from " + format_double(lo) + " to " + format_double(hi) + " across eps");
    }
  }
  return out;
}

SuiteOutcome liminf_check(const ConvergenceReport& report, double slack) {
  SuiteOutcome out;
  const Trajectory& ref = report.reference;
  for (std::size_t k = 0; k < ref.snapshot_energy.size(); ++k) {
    double lo = std::numeric_limits<double>::infinity();
    for (const Trajectory& t : report.trajectories) lo = std::min(lo, t.snapshot_energy.at(k));
    const double e = ref.snapshot_energy[k];
    if (!(e <= (1.0 + slack) * lo + 1e-12)) {
      out.fail("E(phi) = " + format_double(e) + " exceeds min E_eps(phi_eps) = " + format_double(lo) +
               " at t = " + format_double(ref.snapshots[k].t));
    }
  }
  return out;
}

SuiteOutcome time_step_dominance(const ConvergenceReport& coarse_dt, const ConvergenceReport& fine_dt,
                                 double fraction) {
  SuiteOutcome out;
  if (coarse_dt.rows.size() != fine_dt.rows.size()) throw ValidationError("analysis: reports have different rows");
  for (std::size_t i = 0; i < coarse_dt.rows.size(); ++i) {
    const ConvergenceRow& a = coarse_dt.rows[i];
    const ConvergenceRow& b = fine_dt.rows[i];
    for (auto [name, x, y] : {std::tuple{"err_theta_C0H", a.err_theta_C0H, b.err_theta_C0H},
                              std::tuple{"err_phi_C0H", a.err_phi_C0H, b.err_phi_C0H}}) {
      if (!(std::abs(x - y) <= fraction * x)) {
        out.fail(std::string(name) + " at eps = " + format_double(a.eps) + " moves from " + format_double(x) +
                 " to " + format_double(y) + " when dt is halved");
      }
    }
  }
  return out;
}

}  // namespace pfnl
