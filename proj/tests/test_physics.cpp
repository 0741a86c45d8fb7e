#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pfnl/analysis.hpp"
#include "pfnl/error.hpp"
#include "pfnl/physics.hpp"

using namespace pfnl;

namespace {

bool has_kind(const std::vector<PotentialViolation>& v, const std::string& kind) {
  return std::any_of(v.begin(), v.end(), [&](const PotentialViolation& x) { return x.kind == kind; });
}

std::vector<std::pair<double, Grid>> eps_grids(const std::vector<double>& eps) {
  const GridRule rule;
  std::vector<std::pair<double, Grid>> out;
  for (double e : eps) out.emplace_back(e, rule.grid_for(e));
  return out;
}

}  // namespace

TEST_SUITE("physics") {

TEST_CASE("double well passes every structural check") {
  const auto v = validate_potential(make_double_well(), 1);
  CHECK(v.empty());
  CHECK(validate_potential(make_double_well(), 2).empty());
  CHECK(validate_potential(make_zero_potential(), 1).empty());
}

TEST_CASE("decreasing beta is reported as a monotonicity violation") {
  const auto spec = make_polynomial_potential({0.0, -1.0}, 0.0, 2.0, 1.0);
  const auto v = validate_potential(spec);
  CHECK(has_kind(v, "monotonicity"));
  // one report per kind
  CHECK(std::count_if(v.begin(), v.end(), [](const auto& x) { return x.kind == "monotonicity"; }) == 1);
}

TEST_CASE("cubic beta with q = 2 breaks the growth bound") {
  const auto spec = make_polynomial_potential({0.0, 0.0, 0.0, 1.0}, -1.0, 2.0, 1.0);
  CHECK(has_kind(validate_potential(spec), "growth"));
}

TEST_CASE("beta with beta(0) != 0 is flagged") {
  // beta_hat(0) = 0 holds by construction; beta(0) = 1 makes beta_hat negative near 0
  const auto spec = make_polynomial_potential({1.0, 1.0}, 0.0, 2.0, 10.0);
  CHECK_FALSE(validate_potential(spec).empty());
}

TEST_CASE("pointwise maps and integrals") {
  const Grid g = Grid::line(100);
  const auto dw = make_double_well();
  const Field u = Field::sample(g, [](const Field::Point& p) { return p[0]; });
  // int_0^1 x^4 / 4 = 1/20 (midpoint rule error O(h^2))
  CHECK(integral_beta_hat(dw, u) == doctest::Approx(0.05).epsilon(1e-3));
  const Field b = apply_map(dw.beta, u);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(b[i] == doctest::Approx(u[i] * u[i] * u[i]));
  // ||x^3||_{L^{4/3}} = (int x^4)^{3/4} = (1/5)^{3/4}
  CHECK(beta_lq_norm(dw, u) == doctest::Approx(std::pow(0.2, 0.75)).epsilon(1e-3));
}

TEST_CASE("default initial data satisfy the uniform bound") {
  const auto fam = build_kernel_family(MollifierProfile::compact_bump(), 1, 0.0);
  const auto rep =
      evaluate_initial_bound(smooth_default_initial(), fam, make_double_well(), eps_grids({0.2, 0.1, 0.05, 0.025}), 10.0);
  REQUIRE(rep.entries.size() == 4);
  for (const auto& e : rep.entries) {
    CHECK(e.value < 10.0);
    CHECK(e.phi_gap_H == 0.0);
  }
  CHECK_FALSE(rep.unbounded);
}

TEST_CASE("a jump in phi makes the bound blow up like a negative power of eps") {
  const auto fam = build_kernel_family(MollifierProfile::compact_bump(), 1, 0.0);
  InitialRule jump = [](const Grid& g, std::optional<double>) {
    return InitialData{Field(g), Field::sample(g, [](const Field::Point& p) { return p[0] < 0.5 ? -1.0 : 1.0; }),
                       Field(g)};
  };
  const auto rep =
      evaluate_initial_bound(jump, fam, make_zero_potential(), eps_grids({0.1, 0.05, 0.025, 0.0125}), 1e9);
  CHECK(rep.unbounded);
  CHECK(rep.slope < -0.5);
  CHECK_THROWS_AS(evaluate_initial_bound(jump, fam, make_zero_potential(), eps_grids({0.1, 0.01}), 10.0),
                  ValidationError);
}

TEST_CASE("cosine source") {
  const auto f = make_cosine_source(2.0);
  const Field s = f(Grid::line(4), 1.0);
  CHECK(s[0] == doctest::Approx(2.0 * std::cos(M_PI * 0.125) * std::exp(-1.0)));
}

}
