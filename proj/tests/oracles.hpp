#pragma once

// Reference computations written without the library's kernel tables, FFT
// convolution or solvers. Slow, direct and only meant for small grids.

#include <array>
#include <functional>
#include <vector>

#include "pfnl/fields.hpp"

namespace oracle {

/// Composite Simpson rule on [a, b] with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000);

/// 2 / int_{S^{d-1}} |e_1 . sigma|^2, integrated in polar/spherical angles.
double sphere_constant(int d);

/// Kernel with the compact bump (1 - t^2)^2 written out by hand. The
/// normalization is found by quadrature of the moment condition.
struct BumpKernel {
  int d = 1;
  double alpha = 0.0;
  double eps = 0.1;
  double radius = 1.0;
  double normalization = 0.0;

  BumpKernel(int d, double alpha, double eps, double radius = 1.0);
  double rho(double s) const;
  double operator()(double r) const;  // r > 0
};

/// sum_{j != i} J(x_i - x_j) (u_i - u_j) h^d by a double loop.
pfnl::Field direct_B(const BumpKernel& J, const pfnl::Field& u);
/// sum_j J(x_i - x_j) u_j h^d with J(0) supplied separately.
pfnl::Field direct_convolution(const BumpKernel& J, double j_origin, const pfnl::Field& u);
/// 1/4 sum_ij J(x_i - x_j) |u_i - u_j|^2 h^{2d}
double double_sum_energy(const BumpKernel& J, const pfnl::Field& u);

/// Classical RK4 for the spatially constant system
/// theta' = -v + f, phi' = v, v' = -v + theta - beta(phi) - pi(phi).
std::array<double, 3> rk4_constant_system(std::array<double, 3> y, double T, int steps,
                                          const std::function<double(double)>& beta_plus_pi = {});

/// Dense (I - Delta_N) solve by Gaussian elimination, 1D only.
std::vector<double> dense_riesz_inverse_1d(const pfnl::Field& u);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oracle
