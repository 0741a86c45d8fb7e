#include "pfnl/physics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pfnl/error.hpp"
#include "pfnl/operators.hpp"

namespace pfnl {

PotentialSpec make_double_well() {
  PotentialSpec s;
  s.name = "double-well";
  s.beta = [](double r) { return r * r * r; };
  s.beta_prime = [](double r) { return 3.0 * r * r; };
  s.beta_hat = [](double r) { return 0.25 * r * r * r * r; };
  s.pi = [](double r) { return -r; };
  s.q = 4.0 / 3.0;
  s.c_beta = 4.0;
  s.pi_lipschitz = 1.0;
  return s;
}

PotentialSpec make_zero_potential() {
  PotentialSpec s;
  s.name = "zero";
  s.beta = [](double) { return 0.0; };
  s.beta_prime = [](double) { return 0.0; };
  s.beta_hat = [](double) { return 0.0; };
  s.pi = [](double) { return 0.0; };
  s.q = 2.0;
  s.c_beta = 1.0;
  s.pi_lipschitz = 0.0;
  return s;
}

PotentialSpec make_polynomial_potential(std::vector<double> c, double pi_slope, double q, double c_beta) {
  if (c.empty()) c.push_back(0.0);
  auto horner = [](const std::vector<double>& a, double r) {
    double acc = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * r + *it;
    return acc;
  };
  std::vector<double> d(c.size() > 1 ? c.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = k * c[k];
  std::vector<double> a(c.size() + 1, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) a[k + 1] = c[k] / (k + 1.0);

  PotentialSpec s;
  s.name = "custom-polynomial";
  s.beta = [c, horner](double r) { return horner(c, r); };
  s.beta_prime = [d, horner](double r) { return horner(d, r); };
  s.beta_hat = [a, horner](double r) { return horner(a, r); };
  s.pi = [pi_slope](double r) { return pi_slope * r; };
  s.q = q;
  s.c_beta = c_beta;
  s.pi_lipschitz = std::abs(pi_slope);
  return s;
}

std::vector<PotentialViolation> validate_potential(const PotentialSpec& spec, int dimension) {
  std::vector<PotentialViolation> out;
  auto report = [&](const std::string& kind, double r, const std::string& detail) {
    for (const auto& v : out) {
      if (v.kind == kind) return;
    }
    out.push_back({kind, r, detail});
  };
  constexpr double tol = 1e-10;

  if (!(spec.q > 1.0)) report("exponent", 0.0, "q must exceed 1");
  if (dimension == 3 && spec.q < 6.0 / 5.0) report("exponent", 0.0, "q must be at least 6/5 in three dimensions");
  if (!(spec.c_beta > 0.0)) report("growth", 0.0, "c_beta must be positive");
  if (spec.beta_hat(0.0) != 0.0) report("beta_hat_zero", 0.0, "beta_hat(0) must vanish");

  const double h = 2.0 * kLatticeBound / (kLatticePoints - 1);
  std::vector<double> r(kLatticePoints), b(kLatticePoints), bh(kLatticePoints), p(kLatticePoints);
  for (int i = 0; i < kLatticePoints; ++i) {
    r[i] = -kLatticeBound + i * h;
    b[i] = spec.beta(r[i]);
    bh[i] = spec.beta_hat(r[i]);
    p[i] = spec.pi(r[i]);
  }
  for (int i = 0; i < kLatticePoints; ++i) {
    if (i + 1 < kLatticePoints && b[i + 1] - b[i] < -tol) report("monotonicity", r[i], "beta decreases");
    if (bh[i] < -tol) report("beta_hat_nonnegative", r[i], "beta_hat is negative");
    if (i > 0 && i + 1 < kLatticePoints && bh[i - 1] - 2.0 * bh[i] + bh[i + 1] < -tol) {
      report("convexity", r[i], "negative second difference of beta_hat");
    }
    const double delta = 1e-5;
    const double fd = (spec.beta_hat(r[i] + delta) - spec.beta_hat(r[i] - delta)) / (2.0 * delta);
    if (std::abs(fd - b[i]) > 1e-6 * (1.0 + std::abs(b[i]))) {
      report("derivative", r[i], "beta_hat' differs from beta");
    }
    const double lhs = std::pow(std::abs(b[i]), spec.q);
    if (lhs > spec.c_beta * (1.0 + bh[i]) * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "|beta|^q = " << lhs << " exceeds c_beta (1 + beta_hat) = " << spec.c_beta * (1.0 + bh[i]);
      report("growth", r[i], msg.str());
    }
    // Adjacent and mirrored pairs.
    for (int j : {i + 1, kLatticePoints - 1 - i}) {
      if (j <= i || j >= kLatticePoints) continue;
      if (std::abs(p[j] - p[i]) > spec.pi_lipschitz * (r[j] - r[i]) * (1.0 + tol) + tol) {
        report("lipschitz", r[i], "pi exceeds its Lipschitz constant");
      }
    }
  }
  return out;
}

Field apply_map(const ScalarMap& map, const Field& u) {
  Field out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = map(u[i]);
  return out;
}

double integral_beta_hat(const PotentialSpec& spec, const Field& u) { return integral(apply_map(spec.beta_hat, u)); }

double beta_lq_norm(const PotentialSpec& spec, const Field& u) {
  double sum = 0.0;
  for (double x : u.data()) sum += std::pow(std::abs(spec.beta(x)), spec.q);
  return std::pow(sum * u.grid().cell_volume(), 1.0 / spec.q);
}

SourceTerm make_cosine_source(double amplitude) {
  return [amplitude](const Grid& g, double t) {
    const double scale = amplitude * std::exp(-t);
    return Field::sample(g, [&](const Field::Point& x) { return scale * std::cos(std::numbers::pi * x[0]); });
  };
}

InitialKind parse_initial_kind(const std::string& name) {
  if (name == "smooth-default") return InitialKind::SmoothDefault;
  if (name == "constant") return InitialKind::Constant;
  if (name == "custom") return InitialKind::Custom;
  throw ValidationError("physics: unknown initial.kind '" + name + "'");
}

InitialRule smooth_default_initial() {
  return [](const Grid& g, std::optional<double>) {
    InitialData d;
    d.phi = Field::sample(g, [](const Field::Point& x) { return std::cos(std::numbers::pi * x[0]); });
    d.theta = 0.5 * d.phi;
    d.v = Field(g);
    return d;
  };
}

InitialRule constant_initial(double theta, double phi, double v) {
  return [=](const Grid& g, std::optional<double>) { return InitialData{Field(g, theta), Field(g, phi), Field(g, v)}; };
}

InitialRule tabulated_initial(InitialData data) {
  return [data = std::move(data)](const Grid& g, std::optional<double>) {
    return InitialData{restrict_to(data.theta, g), restrict_to(data.phi, g), restrict_to(data.v, g)};
  };
}

A5Report evaluate_initial_bound(const InitialRule& rule, const KernelFamily& family, const PotentialSpec& spec,
                                const std::vector<std::pair<double, Grid>>& eps_grids, double c1) {
  A5Report rep;
  rep.c1 = c1;
  for (const auto& [eps, grid] : eps_grids) {
    const InitialData d = rule(grid, eps);
    const InitialData limit = rule(grid, std::nullopt);
    const NonlocalOperator op(family, eps, grid);
    A5Entry e;
    e.eps = eps;
    e.energy = op.energy(d.phi);
    e.value = inner_product(Space::V, d.theta, d.theta) + inner_product(Space::H, d.phi, d.phi) + e.energy +
              integral_beta_hat(spec, d.phi) + inner_product(Space::H, d.v, d.v);
    e.theta_gap_H = norm_H(d.theta - limit.theta);
    e.phi_gap_H = norm_H(d.phi - limit.phi);
    e.v_gap_Vstar = dual_norm(d.v - limit.v);
    if (e.value > c1) {
      std::ostringstream msg;
      msg << "physics: initial data violate the uniform bound at eps = " << eps << ": " << e.value << " > c1 = " << c1;
      throw ValidationError(msg.str());
    }
    rep.entries.push_back(e);
  }
  if (rep.entries.size() >= 2) {
    // Least-squares slope of log(value) against log(eps).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rep.entries.size());
    for (const A5Entry& e : rep.entries) {
      const double x = std::log(e.eps);
      const double y = std::log(std::max(e.value, 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.unbounded = rep.slope < -0.5;
  } else {
    rep.slope = std::nan("");
  }
  return rep;
}

ProblemData build_initial_data(InitialKind kind, InitialRule rule, const KernelFamily& family,
                               const PotentialSpec& spec, const std::vector<std::pair<double, Grid>>& eps_grids,
                               double c1) {
  ProblemData data;
  data.kind = kind;
  data.initial = std::move(rule);
  data.a5 = evaluate_initial_bound(data.initial, family, spec, eps_grids, c1);
  return data;
}

}  // namespace pfnl
