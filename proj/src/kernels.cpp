#include "pfnl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "pfnl/error.hpp"

namespace pfnl {

namespace {

constexpr double kMomentTolerance = 1e-12;
constexpr double kGaussianRate = 4.5;

template <class F>
double adaptive_gauss(F&& f, double a, double b, double tol = kMomentTolerance) {
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &error);
}

/// Integrals with an integrable endpoint singularity at s = 0.
template <class F>
double singular_integral(F&& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b, 1e-10);
}

double max_abs_sample(const MollifierProfile& profile, bool derivative) {
  double m = 0.0;
  const int samples = 2000;
  for (int i = 0; i <= samples; ++i) {
    const double s = profile.support_radius() * i / samples;
    m = std::max(m, std::abs(derivative ? profile.derivative(s) : profile.value(s)));
  }
  return m;
}

}  // namespace

ProfileShape parse_profile_shape(std::string_view name) {
  if (name == "compact-bump") return ProfileShape::CompactBump;
  if (name == "polynomial-bump") return ProfileShape::PolynomialBump;
  if (name == "gaussian-truncated") return ProfileShape::GaussianTruncated;
  throw ValidationError("kernels: unknown profile '" + std::string(name) +
                        "' (expected compact-bump, polynomial-bump or gaussian-truncated)");
}

std::string_view to_string(ProfileShape shape) {
  switch (shape) {
    case ProfileShape::CompactBump:
      return "compact-bump";
    case ProfileShape::PolynomialBump:
      return "polynomial-bump";
    case ProfileShape::GaussianTruncated:
      return "gaussian-truncated";
    case ProfileShape::Custom:
      return "custom";
  }
  return "custom";
}

MollifierProfile::MollifierProfile(ProfileShape shape, double support_radius, ScalarMap value,
                                   ScalarMap derivative)
    : shape_(shape), support_radius_(support_radius), value_(std::move(value)), derivative_(std::move(derivative)) {
  if (!(support_radius > 0.0) || !std::isfinite(support_radius)) {
    throw ValidationError("kernels: support_radius must be a positive real");
  }
}

MollifierProfile MollifierProfile::compact_bump(double R) {
  return {ProfileShape::CompactBump, R,
          [R](double s) {
            const double t = s / R;
            const double w = 1.0 - t * t;
            return w * w;
          },
          [R](double s) {
            const double t = s / R;
            return -4.0 * t * (1.0 - t * t) / R;
          }};
}

MollifierProfile MollifierProfile::polynomial_bump(double R) {
  return {ProfileShape::PolynomialBump, R,
          [R](double s) {
            const double t = s / R;
            const double w = 1.0 - t * t;
            return w * w * w;
          },
          [R](double s) {
            const double t = s / R;
            const double w = 1.0 - t * t;
            return -6.0 * t * w * w / R;
          }};
}

MollifierProfile MollifierProfile::gaussian_truncated(double R) {
  // Gaussian minus its tangent in t^2 at t = 1: value and slope vanish at the
  // cut, and convexity of e^{-a u} in u = t^2 keeps the result nonnegative.
  const double a = kGaussianRate;
  const double tail = std::exp(-a);
  return {ProfileShape::GaussianTruncated, R,
          [R, a, tail](double s) {
            const double u = (s / R) * (s / R);
            return std::exp(-a * u) - tail + a * tail * (u - 1.0);
          },
          [R, a, tail](double s) {
            const double t = s / R;
            return 2.0 * a * t * (tail - std::exp(-a * t * t)) / R;
          }};
}

MollifierProfile MollifierProfile::from_shape(ProfileShape shape, double R) {
  switch (shape) {
    case ProfileShape::CompactBump:
      return compact_bump(R);
    case ProfileShape::PolynomialBump:
      return polynomial_bump(R);
    case ProfileShape::GaussianTruncated:
      return gaussian_truncated(R);
    case ProfileShape::Custom:
      break;
  }
  throw ValidationError("kernels: custom profiles need a callable");
}

MollifierProfile MollifierProfile::custom(ScalarMap value, double R, ScalarMap derivative) {
  if (!value) throw ValidationError("kernels: custom profile without a value map");
  if (!derivative) {
    derivative = [value, R](double s) {
      const double h = 1e-6 * R;
      const double lo = std::max(0.0, s - h);
      const double hi = std::min(R, s + h);
      if (hi <= lo) return 0.0;
      return (value(hi) - value(lo)) / (hi - lo);
    };
  }
  return {ProfileShape::Custom, R, std::move(value), std::move(derivative)};
}

MollifierProfile MollifierProfile::tabulated(std::vector<double> samples, double R) {
  if (samples.size() < 4) throw ValidationError("kernels: tabulated profile needs at least 4 samples");
  const double step = R / static_cast<double>(samples.size() - 1);
  auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      samples.begin(), samples.end(), 0.0, step, 0.0, 0.0);
  return {ProfileShape::Custom, R, [spline](double s) { return (*spline)(s); },
          [spline](double s) { return spline->prime(s); }};
}

double MollifierProfile::value(double s) const {
  if (s >= support_radius_) return 0.0;
  return value_(std::max(s, 0.0));
}

double MollifierProfile::derivative(double s) const {
  if (s >= support_radius_) return 0.0;
  return derivative_(std::max(s, 0.0));
}

double sphere_area(int d) {
  switch (d) {
    case 1:
      return 2.0;
    case 2:
      return 2.0 * std::numbers::pi;
    case 3:
      return 4.0 * std::numbers::pi;
    default:
      throw ValidationError("kernels: unsupported dimension " + std::to_string(d) + " (expected 1, 2 or 3)");
  }
}

double sphere_constant(int d) {
  // int_{S^{d-1}} sigma_1^2 = |S^{d-1}| / d by symmetry over the d coordinates.
  return 2.0 / (sphere_area(d) / d);
}

KernelFamily::KernelFamily(MollifierProfile profile, int d, double alpha, double normalization, double c_d,
                           IntegrabilityReport report)
    : profile_(std::move(profile)),
      dimension_(d),
      alpha_(alpha),
      normalization_(normalization),
      c_d_(c_d),
      integrability_(report) {}

double KernelFamily::rho_eps(double eps, double r) const {
  return std::pow(eps, -dimension_) * rho(r / eps);
}

KernelFamily KernelFamily::with_normalization(double normalization) const {
  KernelFamily copy = *this;
  copy.normalization_ = normalization;
  return copy;
}

KernelFamily build_kernel_family(MollifierProfile profile, int d, double alpha, IntegrabilityPolicy policy) {
  const double c_d = sphere_constant(d);
  if (!(alpha >= 0.0 && alpha <= d - 1)) {
    throw ValidationError("kernels: alpha = " + std::to_string(alpha) + " outside [0, d-1] = [0, " +
                          std::to_string(d - 1) + "]");
  }
  const double R = profile.support_radius();

  const double peak = max_abs_sample(profile, false);
  for (int i = 0; i <= 2000; ++i) {
    const double s = R * i / 2000.0;
    const double v = profile.value(s);
    if (!std::isfinite(v) || v < -1e-14 * std::max(peak, 1.0)) {
      throw ValidationError("kernels: profile must be finite and nonnegative (rho(" + std::to_string(s) +
                            ") = " + std::to_string(v) + ")");
    }
  }
  if (peak > 0.0) {
    const double edge = R * (1.0 - 1e-9);
    const double slope_peak = max_abs_sample(profile, true);
    if (std::abs(profile.value(edge)) > 1e-6 * peak || std::abs(profile.derivative(edge)) > 1e-4 * slope_peak) {
      throw ValidationError("kernels: profile is not C1 at the edge of its support");
    }
  }

  const double moment_power = d + 1 - alpha;
  const double raw_moment = adaptive_gauss([&](double s) { return profile.value(s) * std::pow(s, moment_power); }, 0.0, R);
  if (!(raw_moment > 0.0) || !std::isfinite(raw_moment)) {
    throw ValidationError("kernels: moment integral of the profile vanishes (zero profile)");
  }
  const double normalization = c_d / raw_moment;

  IntegrabilityReport report;
  const double p1 = d - 1 - alpha;
  report.derivative_integral =
      normalization * adaptive_gauss([&](double s) { return std::abs(profile.derivative(s)) * std::pow(s, p1); }, 0.0, R, 1e-10);
  report.derivative_integrable = std::isfinite(report.derivative_integral);

  const double p2 = d - 2 - alpha;
  if (p2 <= -1.0 && std::abs(profile.value(0.0)) > 1e-14 * std::max(peak, 1.0)) {
    // rho(s) / s near 0 with rho(0) != 0 diverges logarithmically.
    report.profile_integral = std::numeric_limits<double>::infinity();
    report.profile_integrable = false;
  } else {
    report.profile_integral =
        normalization * singular_integral([&](double s) { return profile.value(s) * std::pow(s, p2); }, 0.0, R);
    report.profile_integrable = std::isfinite(report.profile_integral);
  }

  if (policy == IntegrabilityPolicy::Enforce && !report.ok()) {
    throw ValidationError("kernels: profile violates the integrability conditions (rho(s) s^{d-2-alpha} or "
                          "|rho'(s)| s^{d-1-alpha} not in L1) for d = " +
                          std::to_string(d) + ", alpha = " + std::to_string(alpha));
  }
  return KernelFamily(std::move(profile), d, alpha, normalization, c_d, report);
}

double kernel_value(const KernelFamily& family, double eps, double radius) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("kernels: eps must lie in (0, 1]");
  if (radius >= family.support(eps)) return 0.0;
  const double alpha = family.alpha();
  if (radius == 0.0) {
    if (alpha == 0.0) return family.rho_eps(eps, 0.0) / (eps * eps);
    if (family.rho(0.0) == 0.0) return 0.0;
    throw ValidationError("kernels: J_eps is singular at z = 0 when alpha > 0 and rho(0) != 0");
  }
  return family.rho_eps(eps, radius) / (std::pow(eps, 2.0 - alpha) * std::pow(radius, alpha));
}

double kernel_value(const KernelFamily& family, double eps, std::span<const double> z) {
  if (static_cast<int>(z.size()) != family.dimension()) {
    throw ValidationError("kernels: offset vector has wrong dimension");
  }
  double r2 = 0.0;
  for (double c : z) r2 += c * c;
  return kernel_value(family, eps, std::sqrt(r2));
}

double moment_check(const KernelFamily& family) {
  const double power = family.dimension() + 1 - family.alpha();
  const double moment = adaptive_gauss([&](double s) { return family.rho(s) * std::pow(s, power); }, 0.0,
                                       family.profile().support_radius());
  return std::abs(moment - family.c_d()) / family.c_d();
}

KernelMass kernel_w11_norms(const KernelFamily& family, double eps) {
  const int d = family.dimension();
  const double alpha = family.alpha();
  const double R = family.profile().support_radius();
  const double area = sphere_area(d);
  // Radial substitution r = eps s removes eps from the integrands.
  const double mass =
      area / (eps * eps) * singular_integral([&](double s) { return family.rho(s) * std::pow(s, d - 1 - alpha); }, 0.0, R);
  KernelMass out{mass, std::numeric_limits<double>::infinity()};
  if (family.integrability().ok()) {
    out.gradient_mass = area / (eps * eps * eps) * singular_integral(
                                                        [&](double s) {
                                                          return std::abs(family.rho_derivative(s) * std::pow(s, d - 1 - alpha) -
                                                                          alpha * family.rho(s) * std::pow(s, d - 2 - alpha));
                                                        },
                                                        0.0, R);
  }
  return out;
}

double kernel_origin_cell_average(const KernelFamily& family, double eps, const Grid& grid) {
  const int d = grid.dimension();
  if (d != family.dimension()) throw ValidationError("kernels: grid and kernel dimensions differ");
  const double alpha = family.alpha();
  const double m = 1.0 / (d - alpha);
  // int_0^rmax J(r) r^{d-1} dr with r = rmax u^m, which turns r^{d-1-alpha} dr
  // into a constant times du.
  auto radial = [&](double rmax) {
    const double inner =
        adaptive_gauss([&](double u) { return family.rho_eps(eps, rmax * std::pow(u, m)); }, 0.0, 1.0, 1e-13);
    return std::pow(eps, alpha - 2.0) * std::pow(rmax, d - alpha) * m * inner;
  };
  const double a = 0.5 * grid.spacing(0);
  if (d == 1) return 2.0 * radial(a) / (2.0 * a);

  const double b = 0.5 * grid.spacing(1);
  const double corner = std::atan2(b, a);
  const double to_x_face = adaptive_gauss([&](double th) { return radial(a / std::cos(th)); }, 0.0, corner, 1e-13);
  const double to_y_face =
      adaptive_gauss([&](double th) { return radial(b / std::sin(th)); }, corner, 0.5 * std::numbers::pi, 1e-13);
  return 4.0 * (to_x_face + to_y_face) / (4.0 * a * b);
}

EvaluatedKernel::EvaluatedKernel(double eps, int dimension, std::array<int, 2> half_width, std::vector<double> values)
    : eps_(eps), dimension_(dimension), half_width_(half_width), values_(std::move(values)) {}

double EvaluatedKernel::at(int k0, int k1) const {
  if (std::abs(k0) > half_width_[0] || std::abs(k1) > half_width_[1]) return 0.0;
  return values_[static_cast<std::size_t>(k0 + half_width_[0]) * extent(1) + (k1 + half_width_[1])];
}

EvaluatedKernel evaluate_kernel(const KernelFamily& family, double eps, const Grid& grid) {
  const int d = grid.dimension();
  if (d != family.dimension()) throw ValidationError("kernels: grid and kernel dimensions differ");
  std::array<int, 2> half{0, 0};
  for (int a = 0; a < d; ++a) {
    const int reach = static_cast<int>(std::floor(family.support(eps) / grid.spacing(a)));
    half[a] = std::min(grid.cells(a) - 1, reach);
  }
  const int e0 = 2 * half[0] + 1;
  const int e1 = 2 * half[1] + 1;
  std::vector<double> values(static_cast<std::size_t>(e0) * e1, 0.0);
  for (int k0 = -half[0]; k0 <= half[0]; ++k0) {
    for (int k1 = -half[1]; k1 <= half[1]; ++k1) {
      const double z0 = k0 * grid.spacing(0);
      const double z1 = d == 2 ? k1 * grid.spacing(1) : 0.0;
      // Same value for z and -z: the radius is computed from squares.
      const double r = std::sqrt(z0 * z0 + z1 * z1);
      double value = 0.0;
      if (k0 == 0 && k1 == 0 && family.alpha() > 0.0) {
        value = kernel_origin_cell_average(family, eps, grid);
      } else {
        value = kernel_value(family, eps, r);
      }
      values[static_cast<std::size_t>(k0 + half[0]) * e1 + (k1 + half[1])] = value;
    }
  }
  return EvaluatedKernel(eps, d, half, std::move(values));
}

}  // namespace pfnl
