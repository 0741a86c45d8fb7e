#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace pfnl {

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients for a symmetric positive definite
/// operator given as `apply(x, out)`. `inv_diag` (optional) is a Jacobi
/// preconditioner. `x` holds the initial guess and receives the solution.
/// Converged when ||b - A x|| <= tolerance * ||b||.
template <class Apply>
CgResult conjugate_gradient(Apply&& apply, std::span<const double> b, std::span<double> x, double tolerance,
                            int max_iterations, std::span<const double> inv_diag = {}) {
  const std::size_t n = b.size();
  auto dot = [](std::span<const double> a, std::span<const double> c) {
    return std::inner_product(a.begin(), a.end(), c.begin(), 0.0);
  };
  std::vector<double> r(n), z(n), p(n), q(n);
  apply(std::span<const double>(x.data(), n), std::span<double>(q));
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];

  const double b_norm = std::sqrt(dot(b, b));
  CgResult result;
  if (b_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    result.converged = true;
    return result;
  }
  auto precondition = [&] {
    if (inv_diag.empty()) {
      z = r;
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    }
  };
  precondition();
  p = z;
  double rz = dot(r, z);
  double r_norm = std::sqrt(dot(r, r));
  for (int it = 0; it < max_iterations; ++it) {
    if (r_norm <= tolerance * b_norm) {
      result.iterations = it;
      result.relative_residual = r_norm / b_norm;
      result.converged = true;
      return result;
    }
    apply(std::span<const double>(p), std::span<double>(q));
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;
    const double step = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * q[i];
    }
    precondition();
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    r_norm = std::sqrt(dot(r, r));
    result.iterations = it + 1;
  }
  result.relative_residual = r_norm / b_norm;
  result.converged = r_norm <= tolerance * b_norm;
  return result;
}

/// Thomas algorithm for a symmetric tridiagonal system with diagonal `diag`
/// and off-diagonal `off` (off[i] couples i and i+1). Overwrites `rhs` with
/// the solution. Stable for diagonally dominant matrices.
inline void solve_symmetric_tridiagonal(std::span<const double> diag, std::span<const double> off,
                                        std::span<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double denom = diag[0];
  c[0] = n > 1 ? off[0] / denom : 0.0;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - off[i - 1] * c[i - 1];
    c[i] = i + 1 < n ? off[i] / denom : 0.0;
    rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

}  // namespace pfnl
