#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pfnl/grid.hpp"

namespace pfnl {

enum class ProfileShape { CompactBump, GaussianTruncated, PolynomialBump, Custom };

ProfileShape parse_profile_shape(std::string_view name);
std::string_view to_string(ProfileShape shape);

/// Unnormalized radial mollifier profile rho~ : [0, inf) -> [0, inf).
///
/// Built-in shapes are defined on [0, R] in terms of t = s / R and vanish for
/// s >= R together with their first derivative:
///   compact-bump        (1 - t^2)^2
///   polynomial-bump     (1 - t^2)^3
///   gaussian-truncated  e^{-a t^2} - e^{-a} + a e^{-a} (t^2 - 1),  a = 4.5
class MollifierProfile {
 public:
  using ScalarMap = std::function<double(double)>;

  static MollifierProfile compact_bump(double support_radius = 1.0);
  static MollifierProfile polynomial_bump(double support_radius = 1.0);
  static MollifierProfile gaussian_truncated(double support_radius = 1.0);
  static MollifierProfile from_shape(ProfileShape shape, double support_radius = 1.0);

  /// User profile. When `derivative` is empty it is approximated by centered
  /// differences.
  static MollifierProfile custom(ScalarMap value, double support_radius, ScalarMap derivative = {});

  /// Cubic B-spline through `samples` taken uniformly on [0, support_radius]
  /// (first sample at s = 0, last at s = R), with zero end slopes.
  static MollifierProfile tabulated(std::vector<double> samples, double support_radius);

  double value(double s) const;
  double derivative(double s) const;
  double support_radius() const { return support_radius_; }
  ProfileShape shape() const { return shape_; }

 private:
  MollifierProfile(ProfileShape shape, double support_radius, ScalarMap value, ScalarMap derivative);

  ProfileShape shape_;
  double support_radius_;
  ScalarMap value_;
  ScalarMap derivative_;
};

/// c_d = 2 / int_{S^{d-1}} |e_1 . sigma|^2 dH^{d-1}(sigma).
double sphere_constant(int d);

/// Surface measure of the unit sphere S^{d-1} (|S^0| = 2 counts both points).
double sphere_area(int d);

struct IntegrabilityReport {
  /// int_0^inf |rho'(s)| s^{d-1-alpha} ds
  double derivative_integral = 0.0;
  /// int_0^inf rho(s) s^{d-2-alpha} ds (infinite when it diverges at s = 0)
  double profile_integral = 0.0;
  bool derivative_integrable = false;
  bool profile_integrable = false;

  bool ok() const { return derivative_integrable && profile_integrable; }
};

enum class IntegrabilityPolicy {
  Enforce,  ///< non-integrable profiles are rejected
  /// The family is built and the report records the failure. Default, since
  /// rho(s) s^{d-2-alpha} diverges at alpha = d - 1 whenever rho(0) > 0,
  /// while J_eps stays integrable for every alpha < d.
  Report,
};

/// Radial kernel family J_eps(z) = rho_eps(|z|) / (eps^{2-alpha} |z|^alpha),
/// rho_eps(r) = eps^{-d} rho(r / eps), rho = normalization * rho~, with the
/// normalization chosen so that int_0^inf rho(s) s^{d+1-alpha} ds = c_d.
///
/// Immutable after construction.
class KernelFamily {
 public:
  const MollifierProfile& profile() const { return profile_; }
  int dimension() const { return dimension_; }
  double alpha() const { return alpha_; }
  double normalization() const { return normalization_; }
  double c_d() const { return c_d_; }
  const IntegrabilityReport& integrability() const { return integrability_; }

  /// Normalized profile rho(s).
  double rho(double s) const { return normalization_ * profile_.value(s); }
  double rho_derivative(double s) const { return normalization_ * profile_.derivative(s); }
  /// rho_eps(r) = eps^{-d} rho(r / eps).
  double rho_eps(double eps, double r) const;
  /// Radius beyond which J_eps vanishes: eps * support_radius.
  double support(double eps) const { return eps * profile_.support_radius(); }

  /// Same family with a different normalization factor (no moment check).
  KernelFamily with_normalization(double normalization) const;

 private:
  friend KernelFamily build_kernel_family(MollifierProfile, int, double, IntegrabilityPolicy);
  KernelFamily(MollifierProfile profile, int d, double alpha, double normalization, double c_d,
               IntegrabilityReport report);

  MollifierProfile profile_;
  int dimension_;
  double alpha_;
  double normalization_;
  double c_d_;
  IntegrabilityReport integrability_;
};

KernelFamily build_kernel_family(MollifierProfile profile, int d, double alpha,
                                 IntegrabilityPolicy policy = IntegrabilityPolicy::Report);

/// J_eps at a point given by its norm |z|.
double kernel_value(const KernelFamily& family, double eps, double radius);
/// J_eps(z) for a vector z with family.dimension() components.
double kernel_value(const KernelFamily& family, double eps, std::span<const double> z);

/// |int_0^inf rho(s) s^{d+1-alpha} ds - c_d| / c_d
double moment_check(const KernelFamily& family);

/// int_{R^d} J_eps and int_{R^d} |grad J_eps| by radial quadrature. The second
/// is +inf when the integrand is not integrable at the origin.
struct KernelMass {
  double mass;
  double gradient_mass;
};
KernelMass kernel_w11_norms(const KernelFamily& family, double eps);

/// Average of J_eps over the cell [-h_0/2, h_0/2] x ... centered at the
/// origin; used for the z = 0 entry of tabulated kernels when alpha > 0.
double kernel_origin_cell_average(const KernelFamily& family, double eps, const Grid& grid);

/// J_eps tabulated on grid offsets z = (k_0 h_0, k_1 h_1), |k_a| <= half_width[a].
/// Offsets are truncated at n_a - 1 since larger ones never couple two cells.
class EvaluatedKernel {
 public:
  EvaluatedKernel(double eps, int dimension, std::array<int, 2> half_width, std::vector<double> values);

  double eps() const { return eps_; }
  int dimension() const { return dimension_; }
  int half_width(int axis) const { return half_width_[axis]; }
  /// Table extent along an axis: 2 * half_width + 1.
  int extent(int axis) const { return 2 * half_width_[axis] + 1; }
  double at(int k0, int k1 = 0) const;
  std::span<const double> values() const { return values_; }

 private:
  double eps_;
  int dimension_;
  std::array<int, 2> half_width_;
  std::vector<double> values_;
};

EvaluatedKernel evaluate_kernel(const KernelFamily& family, double eps, const Grid& grid);

}  // namespace pfnl
