#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pfnl/error.hpp"
#include "pfnl/kernels.hpp"

using namespace pfnl;

TEST_SUITE("kernels") {

TEST_CASE("sphere constants match angular quadrature") {
  for (int d = 1; d <= 3; ++d) CHECK(sphere_constant(d) == doctest::Approx(oracle::sphere_constant(d)).epsilon(1e-12));
  CHECK(sphere_constant(2) == doctest::Approx(2 / std::numbers::pi).epsilon(1e-14));
  CHECK(sphere_constant(3) == doctest::Approx(1.5 / std::numbers::pi).epsilon(1e-14));
  CHECK(sphere_area(1) == doctest::Approx(2.0));
  CHECK(sphere_area(2) == doctest::Approx(2 * std::numbers::pi));
}

TEST_CASE("compact bump normalization") {
  // int_0^1 (1 - s^2)^2 s^2 ds = 8/105
  const auto fam = build_kernel_family(MollifierProfile::compact_bump(), 1, 0.0);
  CHECK(fam.normalization() == doctest::Approx(105.0 / 8.0).epsilon(1e-12));
  CHECK(moment_check(fam) <= 1e-10);

  for (auto [d, alpha] : {std::pair{1, 0.0}, {2, 0.0}, {2, 0.5}, {2, 1.0}}) {
    const auto f = build_kernel_family(MollifierProfile::compact_bump(), d, alpha);
    const oracle::BumpKernel J(d, alpha, 0.1);
    CAPTURE(d);
    CAPTURE(alpha);
    CHECK(f.normalization() == doctest::Approx(J.normalization).epsilon(1e-9));
    CHECK(moment_check(f) <= 1e-10);
  }
}

TEST_CASE("moment condition holds for every built-in shape and a tabulated profile") {
  std::vector<double> samples;
  for (int i = 0; i <= 32; ++i) {
    const double t = i / 32.0;
    samples.push_back(std::exp(-3 * t * t) * (1 - t * t));
  }
  for (auto p : {MollifierProfile::compact_bump(0.8), MollifierProfile::polynomial_bump(),
                 MollifierProfile::gaussian_truncated(), MollifierProfile::tabulated(samples, 1.0)}) {
    for (int d : {1, 2}) CHECK(moment_check(build_kernel_family(p, d, 0.0)) <= 1e-10);
  }
}

TEST_CASE("kernel values match the closed form and are radial") {
  const auto fam = build_kernel_family(MollifierProfile::compact_bump(), 2, 0.5);
  const oracle::BumpKernel J(2, 0.5, 0.2);
  for (double r : {0.01, 0.05, 0.1, 0.19}) CHECK(kernel_value(fam, 0.2, r) == doctest::Approx(J(r)).epsilon(1e-9));
  CHECK(kernel_value(fam, 0.2, 0.2) == 0.0);
  CHECK(kernel_value(fam, 0.2, 0.3) == 0.0);

  // rotating z leaves J unchanged
  for (double angle = 0.0; angle < 6.28; angle += 0.7) {
    const double z[2] = {0.07 * std::cos(angle), 0.07 * std::sin(angle)};
    CHECK(kernel_value(fam, 0.2, z) == doctest::Approx(kernel_value(fam, 0.2, 0.07)).epsilon(1e-13));
  }
}

TEST_CASE("kernel mass scales like eps^-2") {
  const auto fam = build_kernel_family(MollifierProfile::compact_bump(), 1, 0.0);
  const double m1 = kernel_w11_norms(fam, 0.1).mass;
  const double m2 = kernel_w11_norms(fam, 0.05).mass;
  CHECK(m2 / m1 == doctest::Approx(4.0).epsilon(1e-8));
  // direct: 2 int_0^eps J(r) dr
  const oracle::BumpKernel J(1, 0.0, 0.1);
  const double direct = 2 * oracle::simpson([&](double r) { return r == 0 ? J(1e-300) : J(r); }, 0.0, 0.1);
  CHECK(m1 == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("evaluated kernel table is symmetric and truncated to the support") {
  const auto fam = build_kernel_family(MollifierProfile::compact_bump(), 2, 0.0);
  const Grid g = Grid::square(40);
  const auto K = evaluate_kernel(fam, 0.1, g);
  CHECK(K.half_width(0) >= 4);
  CHECK(K.half_width(0) <= 39);
  for (int a = -K.half_width(0); a <= K.half_width(0); ++a)
    for (int b = -K.half_width(1); b <= K.half_width(1); ++b) {
      CHECK(K.at(a, b) == K.at(-a, b));
      CHECK(K.at(a, b) == K.at(b, a));
      CHECK(K.at(a, b) >= 0.0);
    }
}

TEST_CASE("integrability report") {
  // rho(0) > 0 and alpha = d - 1 makes rho(s) s^{d-2-alpha} non-integrable at 0
  const auto fam = build_kernel_family(MollifierProfile::compact_bump(), 1, 0.0);
  CHECK_FALSE(fam.integrability().profile_integrable);
  CHECK(fam.integrability().derivative_integrable);
  CHECK_THROWS_AS(build_kernel_family(MollifierProfile::compact_bump(), 1, 0.0, IntegrabilityPolicy::Enforce),
                  ValidationError);
  const auto ok = build_kernel_family(MollifierProfile::compact_bump(), 2, 0.0, IntegrabilityPolicy::Enforce);
  CHECK(ok.integrability().ok());
}

TEST_CASE("alpha outside [0, d - 1] is rejected") {
  CHECK_THROWS_AS(build_kernel_family(MollifierProfile::compact_bump(), 1, 0.5), ValidationError);
  CHECK_THROWS_AS(build_kernel_family(MollifierProfile::compact_bump(), 2, -0.1), ValidationError);
  CHECK_THROWS_AS(build_kernel_family(MollifierProfile::compact_bump(), 4, 0.0), ValidationError);
}

}
