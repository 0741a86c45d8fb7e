#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "pfnl/fields.hpp"
#include "pfnl/kernels.hpp"

namespace pfnl {

/// Omega-restricted convolution (J_eps * u)(x_i) = sum_j J_eps(x_i - x_j) u_j h^d,
/// computed by zero-extending u and doing a linear (padded) FFT convolution.
///
/// Immutable after construction and safe to share between threads.
class ConvolutionPlan {
 public:
  ConvolutionPlan(const Grid& grid, EvaluatedKernel kernel);

  const Grid& grid() const;
  const EvaluatedKernel& kernel() const;
  std::array<int, 2> padded_size() const;

  Field apply(const Field& u) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

Field convolve(const ConvolutionPlan& plan, const Field& u);

/// B_eps u = a_eps u - J_eps * u with a_eps = J_eps * 1.
class NonlocalOperator {
 public:
  /// Rejects eps < 4 h with a ResolutionError.
  NonlocalOperator(const KernelFamily& family, double eps, const Grid& grid);

  double eps() const { return eps_; }
  const Grid& grid() const { return plan_.grid(); }
  const ConvolutionPlan& plan() const { return plan_; }
  const Field& a_eps() const { return a_eps_; }
  /// Diagonal of B_eps as a matrix: a_eps - J_eps(0) h^d.
  std::vector<double> diagonal() const;

  Field apply(const Field& u) const;
  double energy(const Field& u) const;

 private:
  double eps_;
  ConvolutionPlan plan_;
  Field a_eps_;
};

/// Minimum number of grid spacings per eps for a resolved kernel.
inline constexpr double kMinCellsPerEps = 4.0;
void check_resolution(double eps, const Grid& grid);

Field apply_B_eps(const NonlocalOperator& op, const Field& u);

/// E_eps(u) = 1/2 (B_eps u, u)_H, which equals the double integral
/// 1/4 sum_ij J_eps(x_i - x_j) |u_i - u_j|^2 h^{2d} on the grid.
double energy_nonlocal(const NonlocalOperator& op, const Field& u);

struct FrechetCheck {
  double pairing = 0.0;                 ///< (B_eps u, v)_H
  double double_sum = 0.0;              ///< 1/2 sum_ij J (u_i - u_j)(v_i - v_j) h^{2d}
  double finite_difference = 0.0;       ///< (E(u + d v) - E(u - d v)) / (2 d)
  double double_sum_residual = 0.0;     ///< |pairing - double_sum|
  double finite_difference_residual = 0.0;  ///< |pairing - finite_difference|
};

FrechetCheck frechet_identity_residual(const NonlocalOperator& op, const Field& u, const Field& v,
                                       double delta = 1e-6);

/// Local operator B u = -Delta_N u.
Field apply_B_local(const Field& u);
/// E(u) = 1/2 ||grad u||_H^2 with face-centered gradients.
double energy_local(const Field& u);

/// ||B_eps u||_{V*} / sqrt(E_eps(u)); throws DegenerateError when E_eps(u)
/// vanishes (u constant).
double bbm_bound_ratio(const NonlocalOperator& op, const Field& u);

/// The operator acting on the phase variable: B_eps for the nonlocal problem,
/// -Delta_N for the local one.
class PhaseOperator {
 public:
  static PhaseOperator local(const Grid& grid);
  static PhaseOperator nonlocal(std::shared_ptr<const NonlocalOperator> op);

  bool is_local() const { return !nonlocal_; }
  const Grid& grid() const { return grid_; }
  std::optional<double> eps() const;
  const NonlocalOperator* nonlocal_operator() const { return nonlocal_.get(); }

  Field apply(const Field& u) const;
  double energy(const Field& u) const;
  std::vector<double> diagonal() const;

 private:
  PhaseOperator(Grid grid, std::shared_ptr<const NonlocalOperator> op);

  Grid grid_;
  std::shared_ptr<const NonlocalOperator> nonlocal_;
};

}  // namespace pfnl
