#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pfnl/grid.hpp"

namespace pfnl {

/// Scalar samples, one per grid cell. Value semantics; arithmetic requires
/// matching grids.
class Field {
 public:
  using Point = std::array<double, 2>;

  Field() = default;
  explicit Field(const Grid& grid, double value = 0.0);
  Field(const Grid& grid, std::vector<double> data);

  /// Samples f at every cell center.
  static Field sample(const Grid& grid, const std::function<double(const Point&)>& f);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  bool all_finite() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
  /// this += s * other
  Field& axpy(double s, const Field& other);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

 private:
  void require_same_grid(const Field& other) const;

  Grid grid_ = Grid::line(4);
  std::vector<double> data_;
};

/// Element of V* identified with an H function through (., .)_H.
class DualField {
 public:
  DualField() = default;
  explicit DualField(Field values) : values_(std::move(values)) {}
  const Field& values() const { return values_; }
  const Grid& grid() const { return values_.grid(); }

 private:
  Field values_;
};

enum class Space { H, V };

/// (u, w)_H by the midpoint rule; (u, w)_V adds face-centered gradients with
/// zero flux through the boundary.
double inner_product(Space space, const Field& u, const Field& w);
double norm_H(const Field& u);
double norm_V(const Field& u);
/// (grad u, grad w)_H with face-centered differences.
double gradient_inner(const Field& u, const Field& w);
/// ||grad u||_H
double gradient_norm(const Field& u);
/// ||u||_W = sqrt(||Delta_N u||_H^2 + ||u||_H^2)
double norm_W(const Field& u);
/// int_Omega u
double integral(const Field& u);

/// Second-difference Laplacian with reflected ghost cells. Satisfies
/// (-Delta u, w)_H = (grad u, grad w)_H exactly.
Field neumann_laplacian(const Field& u);

/// Solves (diag(shift) - Delta_N) w = rhs. Direct tridiagonal elimination in
/// d = 1; Jacobi-preconditioned CG to `tolerance` (relative residual) in d = 2.
/// `shift` must be positive somewhere and nonnegative everywhere.
Field solve_shifted_neumann(std::span<const double> shift, const Field& rhs, double tolerance = 1e-12);
Field solve_shifted_neumann(double shift, const Field& rhs, double tolerance = 1e-12);

/// Riesz map F: (F v, w) = (v, w)_V, i.e. F = I - Delta_N under H-identification.
DualField riesz_map(const Field& v);
/// F^{-1} u, the solution of (I - Delta_N) w = u.
Field riesz_inverse(const DualField& u, double tolerance = 1e-12);
/// ||u||_{V*} = sqrt((u, F^{-1} u)_H).
double dual_norm(const DualField& u, double tolerance = 1e-12);
inline double dual_norm(const Field& u, double tolerance = 1e-12) { return dual_norm(DualField(u), tolerance); }

/// Cell-average restriction onto a grid covering the same box (overlap
/// weighted, so the fine grid need not be a refinement of the coarse one).
Field restrict_to(const Field& fine, const Grid& coarse);

}  // namespace pfnl
